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

#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "paddy/core/clock.hpp"

namespace paddy::orchestrator {

enum class WorkerState { kStarting, kIdle, kBusy, kFailed, kStopped };

std::string_view to_string(WorkerState s);

struct Heartbeat {
  WorkerState state = WorkerState::kStarting;
  TimePoint at;
};

/// In-process channel from workers to the master.
class HeartbeatChannel {
 public:
  void beat(std::string const& worker_id, WorkerState state, TimePoint at);
  std::optional<Heartbeat> last(std::string const& worker_id) const;
  void forget(std::string const& worker_id);

 private:
  mutable std::mutex mu_;
  std::map<std::string, Heartbeat> beats_;
};

}  // namespace paddy::orchestrator
