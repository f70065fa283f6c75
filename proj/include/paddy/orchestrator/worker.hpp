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
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "paddy/broker/broker.hpp"
#include "paddy/inference/backend.hpp"
#include "paddy/inference/pipeline.hpp"
#include "paddy/orchestrator/heartbeat.hpp"
#include "paddy/orchestrator/messages.hpp"

namespace paddy::orchestrator {

/// Fetches encoded image bytes by content digest.
using ImageSource = std::function<std::string(std::string const& digest)>;

struct WorkerSpec {
  TaskKind task_kind = TaskKind::kClassification;
  std::string backend_id;
  std::string queue_in;
  std::string queue_out = kResultsQueue;
};

struct WorkerOptions {
  Duration heartbeat_interval = std::chrono::seconds(2);
  Duration job_lease = std::chrono::seconds(30);
  /// Longest single wait on the inbound queue.
  std::chrono::milliseconds poll = std::chrono::milliseconds(100);
  inference::DetectOptions detect;
  inference::VerifyOptions verify;
};

struct WorkerContext {
  std::shared_ptr<broker::MessageBroker> broker;
  ImageSource images;
  std::shared_ptr<HeartbeatChannel> heartbeats;
  std::shared_ptr<Clock> clock = system_clock();
};

/// One consume → infer → publish loop on its own thread, plus a heartbeat
/// thread. The backend instance is owned exclusively.
class Worker {
 public:
  /// `verifier` classifies crops for jobs that ask for verification; if
  /// absent the main backend is used when it can classify.
  Worker(std::string worker_id, WorkerSpec spec,
         std::unique_ptr<inference::ModelBackend> backend,
         std::unique_ptr<inference::ModelBackend> verifier, WorkerContext context,
         WorkerOptions options);
  ~Worker();
  Worker(Worker const&) = delete;
  Worker& operator=(Worker const&) = delete;

  void start();
  /// Finish the current job, then stop.
  void request_stop();
  /// Fault injection: stop heartbeating and abandon the current job
  /// without acknowledging it.
  void kill();
  void join();

  std::string const& id() const { return id_; }
  WorkerSpec const& spec() const { return spec_; }
  WorkerState state() const { return state_.load(); }
  bool finished() const { return finished_.load(); }
  std::uint64_t jobs_completed() const { return completed_.load(); }

  /// Runs one job payload to a result. Throws on failure.
  ResultMessage process(JobMessage const& job);

 private:
  void run();
  void heartbeat_loop();
  void handle(broker::Delivery const& delivery);
  void set_state(WorkerState s);

  std::string id_;
  WorkerSpec spec_;
  std::unique_ptr<inference::ModelBackend> backend_;
  std::unique_ptr<inference::ModelBackend> verifier_;
  WorkerContext ctx_;
  WorkerOptions options_;

  std::atomic<WorkerState> state_{WorkerState::kStarting};
  std::atomic<bool> stop_{false};
  std::atomic<bool> killed_{false};
  std::atomic<bool> finished_{false};
  std::atomic<std::uint64_t> completed_{0};
  std::mutex wake_mu_;
  std::condition_variable wake_;
  std::thread thread_;
  std::thread heartbeat_thread_;
};

}  // namespace paddy::orchestrator
