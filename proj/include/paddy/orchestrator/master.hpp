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

#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "paddy/orchestrator/worker.hpp"

namespace paddy::orchestrator {

enum class RestartPolicy { kAlways, kNever };

struct PoolConfig {
  std::size_t size = 0;
  /// Key into MasterConfig::backends.
  std::string backend_id;
  /// Optional crop classifier for verification, also a catalog key.
  std::string verifier_id;
};

struct MasterConfig {
  std::map<TaskKind, PoolConfig> pools;
  /// Backends available to pools and hot swaps, by backend id.
  std::map<std::string, inference::BackendFactory> backends;
  int missed_heartbeats_limit = 3;
  RestartPolicy restart_policy = RestartPolicy::kAlways;
  bool durable_queues = false;
  WorkerOptions worker;
};

struct WorkerStatus {
  std::string worker_id;
  WorkerSpec spec;
  WorkerState state = WorkerState::kStarting;
  std::optional<TimePoint> last_heartbeat;
  std::uint64_t jobs_completed = 0;
};

/// Supervises worker pools: spawns them, dismisses workers whose
/// heartbeats lapse, respawns per policy, scales and hot-swaps.
class Master {
 public:
  /// Throws Unavailable if the broker is down, NotFound for a pool whose
  /// backend is not in the catalog and Unsupported when a backend lacks the
  /// pool's capability. Nothing is spawned on error.
  static std::unique_ptr<Master> start(MasterConfig config,
                                       std::shared_ptr<broker::MessageBroker> broker,
                                       ImageSource images,
                                       std::shared_ptr<Clock> clock = system_clock());
  ~Master();
  Master(Master const&) = delete;
  Master& operator=(Master const&) = delete;

  /// Grows by spawning or shrinks by draining. Returns the new target.
  /// `n` must be non-negative.
  std::size_t scale(TaskKind kind, long n);
  /// Replaces the pool's workers one at a time, each replacement started
  /// before its predecessor drains. Blocks until the swap completes.
  void hot_swap(TaskKind kind, std::string const& backend_id);
  /// Fault injection. Returns false for an unknown id.
  bool kill_worker(std::string const& worker_id);

  std::vector<WorkerStatus> workers() const;
  std::size_t pool_size(TaskKind kind) const;
  std::string pool_backend(TaskKind kind) const;
  /// Workers dismissed for missed heartbeats so far.
  std::size_t dismissed_count() const;
  /// Blocks until every draining worker has exited or the timeout passes.
  bool wait_drained(Duration timeout);
  /// Drains every worker and stops supervising.
  void stop();

 private:
  Master(MasterConfig config, std::shared_ptr<broker::MessageBroker> broker,
         ImageSource images, std::shared_ptr<Clock> clock);

  std::shared_ptr<Worker> spawn_locked(TaskKind kind);
  void supervise();
  void reap_finished_locked();
  std::unique_ptr<inference::ModelBackend> make_checked(std::string const& backend_id,
                                                        TaskKind kind) const;

  MasterConfig config_;
  std::shared_ptr<broker::MessageBroker> broker_;
  ImageSource images_;
  std::shared_ptr<Clock> clock_;
  std::shared_ptr<HeartbeatChannel> heartbeats_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::uint64_t next_worker_ = 1;
  std::size_t dismissed_ = 0;
  std::map<TaskKind, std::vector<std::shared_ptr<Worker>>> pools_;
  std::vector<std::shared_ptr<Worker>> draining_;
  std::vector<std::shared_ptr<Worker>> retired_;
  std::thread supervisor_;
};

}  // namespace paddy::orchestrator
