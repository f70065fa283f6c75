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

#include <chrono>
#include <memory>
#include <string>

#include "paddy/broker/broker.hpp"

namespace httplib {
class Server;
}

namespace paddy::broker {

/// Exposes `broker` under /internal/broker/ on an HTTP server. Requests
/// must carry the key in an X-Broker-Key header; payloads travel base64
/// encoded inside JSON.
void mount_broker_routes(httplib::Server& server,
                         std::shared_ptr<MessageBroker> broker,
                         std::string api_key);

/// MessageBroker over the routes above, for workers in another process.
/// Transport failures surface as Unavailable.
class RemoteBroker final : public MessageBroker {
 public:
  RemoteBroker(std::string host, int port, std::string api_key,
               std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~RemoteBroker() override;

  void declare_queue(std::string const& name, bool durable = false) override;
  std::uint64_t publish(std::string const& queue, std::string payload) override;
  std::optional<Delivery> consume(
      std::string const& queue, std::string const& consumer_id,
      std::optional<Duration> lease_duration = std::nullopt) override;
  /// Long-polls in rounds of at most one second.
  std::optional<Delivery> consume_wait(
      std::string const& queue, std::string const& consumer_id,
      Duration timeout, std::optional<Duration> lease_duration = std::nullopt) override;
  void ack(Lease const& lease) override;
  void nack(Lease const& lease, bool requeue) override;
  QueueStats stats(std::string const& queue) override;
  bool healthy() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace paddy::broker
