// Copyright 2026 The Paddy Diagnosis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "paddy/broker/broker.hpp"
#include "paddy/gateway/service.hpp"

namespace httplib {
class Server;
}

namespace paddy::gateway {

/// Deployment settings, normally read from PADDY_* environment variables.
struct ServerConfig {
  std::string host = "0.0.0.0";
  /// 0 binds an ephemeral port.
  int port = 8080;
  std::filesystem::path data_dir = "paddy-data";
  /// Empty selects the bundled knowledge base.
  std::filesystem::path treatments_path;
  Duration token_ttl = std::chrono::hours(24);
  int pbkdf2_iterations = kDefaultPbkdf2Iterations;
  /// Enables /internal/ routes for out-of-process workers when non-empty.
  std::string broker_key;
  bool durable_queues = true;
  bool sync_writes = false;
  /// Value for Access-Control-Allow-Origin; empty sends no CORS headers.
  std::string cors_origin;

  using Lookup = std::function<std::optional<std::string>(std::string const&)>;
  /// Reads PADDY_LISTEN (host:port), PADDY_DATA_DIR, PADDY_TREATMENTS,
  /// PADDY_TOKEN_TTL_SECONDS, PADDY_PBKDF2_ITERATIONS, PADDY_BROKER_KEY,
  /// PADDY_DURABLE_QUEUES, PADDY_SYNC_WRITES and PADDY_CORS_ORIGIN over the
  /// defaults. Throws InvalidInput for unparseable values.
  static ServerConfig from_env(Lookup const& lookup);
  static ServerConfig from_env();
};

struct RouteOptions {
  /// Served under /internal/ when `broker_key` is set.
  std::shared_ptr<broker::MessageBroker> broker;
  std::string broker_key;
  std::string cors_origin;
};

/// Registers the public API (and optionally the internal worker routes).
void mount_gateway_routes(httplib::Server& server, std::shared_ptr<Gateway> gateway,
                          RouteOptions const& options);

/// Gateway, embedded broker and HTTP listener wired from a ServerConfig.
class GatewayServer {
 public:
  explicit GatewayServer(ServerConfig config);
  ~GatewayServer();
  GatewayServer(GatewayServer const&) = delete;
  GatewayServer& operator=(GatewayServer const&) = delete;

  /// Binds, starts the result consumer and serves on a background thread.
  /// Throws Unavailable if the address cannot be bound.
  void start();
  void stop();
  /// Blocks until `stop` is called from elsewhere.
  void wait();

  int port() const { return port_; }
  std::shared_ptr<Gateway> gateway() const { return gateway_; }
  std::shared_ptr<broker::Broker> broker() const { return broker_; }
  std::shared_ptr<BlobStore> blobs() const { return blobs_; }

 private:
  ServerConfig config_;
  std::shared_ptr<broker::Broker> broker_;
  std::shared_ptr<BlobStore> blobs_;
  std::shared_ptr<Gateway> gateway_;
  std::unique_ptr<httplib::Server> http_;
  std::thread listener_;
  int port_ = 0;
};

/// Fetches images from a gateway's /internal/blobs route. Missing blobs
/// surface as NotFound, transport failures as Unavailable.
std::function<std::string(std::string const&)> remote_image_source(std::string host, int port,
                                                                   std::string broker_key);

}  // namespace paddy::gateway
