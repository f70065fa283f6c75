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

#include "paddy/orchestrator/heartbeat.hpp"

namespace paddy::orchestrator {

std::string_view to_string(WorkerState s) {
  switch (s) {
    case WorkerState::kStarting: return "starting";
    case WorkerState::kIdle: return "idle";
    case WorkerState::kBusy: return "busy";
    case WorkerState::kFailed: return "failed";
    case WorkerState::kStopped: return "stopped";
  }
  return "starting";
}

void HeartbeatChannel::beat(std::string const& worker_id, WorkerState state,
                            TimePoint at) {
  std::lock_guard lock(mu_);
  beats_[worker_id] = {state, at};
}

std::optional<Heartbeat> HeartbeatChannel::last(std::string const& worker_id) const {
  std::lock_guard lock(mu_);
  auto it = beats_.find(worker_id);
  if (it == beats_.end()) return std::nullopt;
  return it->second;
}

void HeartbeatChannel::forget(std::string const& worker_id) {
  std::lock_guard lock(mu_);
  beats_.erase(worker_id);
}

}  // namespace paddy::orchestrator
