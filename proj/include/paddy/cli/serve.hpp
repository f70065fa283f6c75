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

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "paddy/orchestrator/master.hpp"

namespace paddy::cli {

/// Worker-tier settings: backends by id, pool sizes and worker timing.
///   {"backends": [{"id", "kind", "version", "classify", "detect",
///                  "input_side", "fixtures", "latency_ms"}],
///    "pools": {"detection": {"size", "backend", "verifier"}},
///    "worker": {"heartbeat_ms", "job_lease_ms", "conf_threshold", "nms_iou"},
///    "missed_heartbeats": 3}
/// Relative fixture paths resolve against `base_dir`.
orchestrator::MasterConfig parse_master_config(nlohmann::json const& doc,
                                               std::filesystem::path const& base_dir);

/// Gateway from PADDY_* variables, with an embedded worker tier when
/// `workers` has pools. Returns when `stop` becomes true.
void serve_gateway(std::optional<orchestrator::MasterConfig> workers,
                   std::atomic<bool> const& stop);

/// Worker tier attached to a remote gateway's internal routes.
void serve_worker(orchestrator::MasterConfig workers, std::string const& host, int port,
                  std::string const& broker_key, std::atomic<bool> const& stop);

}  // namespace paddy::cli
