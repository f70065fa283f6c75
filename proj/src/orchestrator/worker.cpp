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

#include "paddy/orchestrator/worker.hpp"

#include <spdlog/spdlog.h>

#include "paddy/core/error.hpp"

namespace paddy::orchestrator {

Worker::Worker(std::string worker_id, WorkerSpec spec,
               std::unique_ptr<inference::ModelBackend> backend,
               std::unique_ptr<inference::ModelBackend> verifier,
               WorkerContext context, WorkerOptions options)
    : id_(std::move(worker_id)),
      spec_(std::move(spec)),
      backend_(std::move(backend)),
      verifier_(std::move(verifier)),
      ctx_(std::move(context)),
      options_(options) {
  if (!backend_) fail(ErrorCode::kInvalidInput, "worker needs a backend");
  if (!ctx_.broker || !ctx_.images || !ctx_.heartbeats || !ctx_.clock) {
    fail(ErrorCode::kInvalidInput, "worker context is incomplete");
  }
  if (spec_.queue_in.empty()) spec_.queue_in = job_queue(spec_.task_kind);
}

Worker::~Worker() {
  request_stop();
  join();
}

void Worker::start() {
  ctx_.heartbeats->beat(id_, WorkerState::kStarting, ctx_.clock->now());
  thread_ = std::thread([this] { run(); });
  heartbeat_thread_ = std::thread([this] { heartbeat_loop(); });
}

void Worker::request_stop() {
  stop_ = true;
  wake_.notify_all();
}

void Worker::kill() {
  killed_ = true;
  set_state(WorkerState::kFailed);
  wake_.notify_all();
}

void Worker::join() {
  if (thread_.joinable()) thread_.join();
  if (heartbeat_thread_.joinable()) heartbeat_thread_.join();
}

void Worker::set_state(WorkerState s) {
  if (killed_ && s != WorkerState::kFailed) return;
  state_ = s;
}

void Worker::heartbeat_loop() {
  std::unique_lock lock(wake_mu_);
  while (!killed_ && !finished_) {
    ctx_.heartbeats->beat(id_, state_.load(), ctx_.clock->now());
    wake_.wait_for(lock, options_.heartbeat_interval,
                   [this] { return killed_.load() || finished_.load(); });
  }
  if (!killed_) ctx_.heartbeats->beat(id_, state_.load(), ctx_.clock->now());
}

void Worker::run() {
  set_state(WorkerState::kIdle);
  while (!stop_ && !killed_) {
    std::optional<broker::Delivery> delivery;
    try {
      delivery = ctx_.broker->consume_wait(spec_.queue_in, id_, options_.poll,
                                           options_.job_lease);
    } catch (Error const& e) {
      spdlog::warn("worker {}: consume failed: {}", id_, e.what());
      std::unique_lock lock(wake_mu_);
      wake_.wait_for(lock, options_.poll, [this] { return stop_ || killed_; });
      continue;
    }
    if (!delivery) continue;
    set_state(WorkerState::kBusy);
    handle(*delivery);
    if (killed_) break;
    set_state(WorkerState::kIdle);
  }
  set_state(WorkerState::kStopped);
  finished_ = true;
  wake_.notify_all();
}

void Worker::handle(broker::Delivery const& delivery) {
  auto const& lease = delivery.lease;
  auto nack = [&] {
    try {
      ctx_.broker->nack(lease, true);
    } catch (Error const& e) {
      spdlog::warn("worker {}: nack failed: {}", id_, e.what());
    }
  };

  JobMessage job;
  try {
    job = JobMessage::parse(delivery.envelope.payload);
  } catch (Error const& e) {
    spdlog::warn("worker {}: rejecting message {}: {}", id_,
                 delivery.envelope.message_id, e.what());
    nack();
    return;
  }
  try {
    ResultMessage notice;
    notice.job_id = job.job_id;
    notice.backend_id = backend_->info().backend_id;
    notice.worker_id = id_;
    notice.progress = true;
    ctx_.broker->publish(spec_.queue_out, notice.serialize());

    ResultMessage result = process(job);
    if (killed_) return;
    ctx_.broker->publish(spec_.queue_out, result.serialize());
    ctx_.broker->ack(lease);
    ++completed_;
  } catch (Error const& e) {
    if (killed_) return;
    spdlog::warn("worker {}: job {} failed (delivery {}): {}", id_, job.job_id,
                 delivery.envelope.delivery_count, e.what());
    nack();
  }
}

ResultMessage Worker::process(JobMessage const& job) {
  if (job.task_kind != spec_.task_kind) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("job {} is {} but worker {} serves {}", job.job_id,
                     to_string(job.task_kind), id_, to_string(spec_.task_kind)));
  }
  auto const input = inference::ImageInput::from_bytes(ctx_.images(job.image_digest));
  if (input.digest != job.image_digest) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("image bytes do not match digest {}", job.image_digest));
  }

  ResultMessage r;
  r.job_id = job.job_id;
  r.backend_id = backend_->info().backend_id;
  r.worker_id = id_;
  if (job.task_kind == TaskKind::kClassification) {
    r.classification = inference::classify(*backend_, input);
    return r;
  }

  inference::DetectOptions opts = options_.detect;
  if (job.conf_threshold) opts.conf_threshold = *job.conf_threshold;
  if (job.nms_iou) opts.nms_iou = *job.nms_iou;
  r.detections = inference::detect(*backend_, input, opts);
  if (job.verify) {
    inference::ModelBackend* classifier = verifier_.get();
    if (!classifier && backend_->info().can_classify) classifier = backend_.get();
    if (!classifier) {
      fail(ErrorCode::kUnsupported,
           fmt::format("worker {} has no classifier for verification", id_));
    }
    r.detections = inference::verify_detections(input, std::move(r.detections),
                                                *classifier, options_.verify);
  }
  return r;
}

}  // namespace paddy::orchestrator
