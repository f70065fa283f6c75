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

#include "paddy/cli/serve.hpp"

#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "paddy/broker/remote.hpp"
#include "paddy/core/error.hpp"
#include "paddy/gateway/server.hpp"

namespace paddy::cli {

using nlohmann::json;
using std::chrono::milliseconds;

namespace {

void only_keys(json const& j, std::initializer_list<char const*> keys, std::string const& where) {
  if (!j.is_object()) fail(ErrorCode::kInvalidInput, where + " must be an object");
  for (auto const& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](char const* key) { return k == key; })) {
      fail(ErrorCode::kInvalidInput, fmt::format("{}: unknown key '{}'", where, k));
    }
  }
}

void wait_for(std::atomic<bool> const& stop) {
  while (!stop) std::this_thread::sleep_for(milliseconds(100));
}

}  // namespace

orchestrator::MasterConfig parse_master_config(json const& doc, std::filesystem::path const& base_dir) {
  orchestrator::MasterConfig mc;
  try {
    only_keys(doc, {"backends", "pools", "worker", "missed_heartbeats"}, "worker config");
    auto const backends = doc.value("backends", json::array());
    for (auto const& b : backends) {
      only_keys(b, {"id", "kind", "version", "classify", "detect", "input_side", "fixtures", "latency_ms"},
                "backend");
      inference::BackendSpec spec;
      spec.backend_id = b.at("id").get<std::string>();
      spec.kind = b.value("kind", spec.kind);
      spec.version = b.value("version", spec.version);
      spec.classify = b.value("classify", spec.classify);
      spec.detect = b.value("detect", spec.detect);
      spec.input_side = b.value("input_side", spec.input_side);
      spec.latency = milliseconds(b.value("latency_ms", 0));
      if (b.contains("fixtures")) {
        std::filesystem::path p = b.at("fixtures").get<std::string>();
        spec.fixture_path = p.is_absolute() ? p : base_dir / p;
      }
      if (mc.backends.contains(spec.backend_id)) {
        fail(ErrorCode::kInvalidInput, fmt::format("backend '{}' listed twice", spec.backend_id));
      }
      mc.backends[spec.backend_id] = inference::backend_factory(spec);
    }
    auto const pools = doc.value("pools", json::object());
    for (auto const& [kind, p] : pools.items()) {
      only_keys(p, {"size", "backend", "verifier"}, "pool " + kind);
      auto const size = p.value("size", 1);
      if (size < 0) fail(ErrorCode::kInvalidInput, "pool size must be non-negative");
      mc.pools[orchestrator::parse_task_kind(kind)] = {static_cast<std::size_t>(size),
                                                       p.at("backend").get<std::string>(),
                                                       p.value("verifier", std::string())};
    }
    auto const w = doc.value("worker", json::object());
    only_keys(w, {"heartbeat_ms", "job_lease_ms", "conf_threshold", "nms_iou"}, "worker");
    mc.worker.heartbeat_interval = milliseconds(w.value("heartbeat_ms", 2000));
    mc.worker.job_lease = milliseconds(w.value("job_lease_ms", 30000));
    mc.worker.detect.conf_threshold = w.value("conf_threshold", mc.worker.detect.conf_threshold);
    mc.worker.detect.nms_iou = w.value("nms_iou", mc.worker.detect.nms_iou);
    mc.worker.detect.validate();
    mc.missed_heartbeats_limit = doc.value("missed_heartbeats", mc.missed_heartbeats_limit);
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("worker config: {}", e.what()));
  }
  return mc;
}

void serve_gateway(std::optional<orchestrator::MasterConfig> workers, std::atomic<bool> const& stop) {
  gateway::GatewayServer server(gateway::ServerConfig::from_env());
  server.start();
  std::unique_ptr<orchestrator::Master> master;
  if (workers && !workers->pools.empty()) {
    auto blobs = server.blobs();
    master = orchestrator::Master::start(
        std::move(*workers), server.broker(),
        [blobs](std::string const& digest) { return blobs->get(digest); });
    spdlog::info("embedded worker tier started");
  }
  wait_for(stop);
  if (master) master->stop();
  server.stop();
}

void serve_worker(orchestrator::MasterConfig workers, std::string const& host, int port,
                  std::string const& broker_key, std::atomic<bool> const& stop) {
  if (workers.pools.empty()) fail(ErrorCode::kInvalidInput, "worker config defines no pools");
  auto remote = std::make_shared<broker::RemoteBroker>(host, port, broker_key);
  auto master = orchestrator::Master::start(std::move(workers), remote,
                                            gateway::remote_image_source(host, port, broker_key));
  spdlog::info("worker tier attached to {}:{}", host, port);
  wait_for(stop);
  master->stop();
}

}  // namespace paddy::cli
