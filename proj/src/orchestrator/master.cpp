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

#include "paddy/orchestrator/master.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "paddy/core/error.hpp"

namespace paddy::orchestrator {
namespace {

constexpr TaskKind kKinds[] = {TaskKind::kClassification, TaskKind::kDetection};

bool capable(inference::BackendInfo const& info, TaskKind kind) {
  return kind == TaskKind::kClassification ? info.can_classify : info.can_detect;
}

}  // namespace

Master::Master(MasterConfig config, std::shared_ptr<broker::MessageBroker> broker,
               ImageSource images, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      broker_(std::move(broker)),
      images_(std::move(images)),
      clock_(std::move(clock)),
      heartbeats_(std::make_shared<HeartbeatChannel>()) {}

std::unique_ptr<inference::ModelBackend> Master::make_checked(std::string const& backend_id,
                                                              TaskKind kind) const {
  auto it = config_.backends.find(backend_id);
  if (it == config_.backends.end()) {
    fail(ErrorCode::kNotFound, fmt::format("unknown backend '{}'", backend_id));
  }
  auto backend = it->second();
  if (!capable(backend->info(), kind)) {
    fail(ErrorCode::kUnsupported,
         fmt::format("backend '{}' cannot serve {} jobs", backend_id, to_string(kind)));
  }
  return backend;
}

std::unique_ptr<Master> Master::start(MasterConfig config,
                                      std::shared_ptr<broker::MessageBroker> broker,
                                      ImageSource images, std::shared_ptr<Clock> clock) {
  if (!broker || !broker->healthy()) fail(ErrorCode::kUnavailable, "broker unreachable");
  if (!images) fail(ErrorCode::kInvalidInput, "master needs an image source");
  if (config.missed_heartbeats_limit < 1) {
    fail(ErrorCode::kInvalidInput, "missed_heartbeats_limit must be at least 1");
  }
  if (config.worker.heartbeat_interval <= Duration::zero()) {
    fail(ErrorCode::kInvalidInput, "heartbeat interval must be positive");
  }
  std::unique_ptr<Master> m(new Master(std::move(config), broker, std::move(images),
                                       std::move(clock)));
  for (auto const& [kind, pool] : m->config_.pools) {
    if (pool.size == 0 && pool.backend_id.empty()) continue;
    m->make_checked(pool.backend_id, kind);
    if (!pool.verifier_id.empty()) m->make_checked(pool.verifier_id, TaskKind::kClassification);
  }
  try {
    for (TaskKind kind : kKinds) broker->declare_queue(job_queue(kind), m->config_.durable_queues);
    broker->declare_queue(kResultsQueue, m->config_.durable_queues);
  } catch (Error const& e) {
    fail(ErrorCode::kUnavailable, fmt::format("broker unreachable: {}", e.what()));
  }

  {
    std::lock_guard lock(m->mu_);
    for (auto const& [kind, pool] : m->config_.pools) {
      for (std::size_t i = 0; i < pool.size; ++i) m->spawn_locked(kind);
    }
  }
  m->supervisor_ = std::thread([mp = m.get()] { mp->supervise(); });
  return m;
}

Master::~Master() { stop(); }

std::shared_ptr<Worker> Master::spawn_locked(TaskKind kind) {
  auto const& pool = config_.pools[kind];
  auto backend = make_checked(pool.backend_id, kind);
  std::unique_ptr<inference::ModelBackend> verifier;
  if (!pool.verifier_id.empty()) verifier = make_checked(pool.verifier_id, TaskKind::kClassification);

  WorkerSpec spec{kind, backend->info().backend_id, job_queue(kind), kResultsQueue};
  auto id = fmt::format("{}-{}", to_string(kind), next_worker_++);
  auto worker = std::make_shared<Worker>(
      id, spec, std::move(backend), std::move(verifier),
      WorkerContext{broker_, images_, heartbeats_, clock_}, config_.worker);
  worker->start();
  pools_[kind].push_back(worker);
  spdlog::info("spawned worker {} ({})", id, spec.backend_id);
  return worker;
}

void Master::reap_finished_locked() {
  for (auto* list : {&draining_, &retired_}) {
    std::erase_if(*list, [this](auto const& w) {
      if (!w->finished()) return false;
      w->join();
      heartbeats_->forget(w->id());
      return true;
    });
  }
}

void Master::supervise() {
  Duration const tick = std::max<Duration>(config_.worker.heartbeat_interval / 4,
                                           std::chrono::milliseconds(5));
  Duration const limit = config_.worker.heartbeat_interval * config_.missed_heartbeats_limit;
  std::unique_lock lock(mu_);
  while (!stopping_) {
    TimePoint const now = clock_->now();
    for (auto& [kind, pool] : pools_) {
      for (auto it = pool.begin(); it != pool.end();) {
        auto const hb = heartbeats_->last((*it)->id());
        bool const lapsed = !hb || now - hb->at > limit || (*it)->finished();
        if (!lapsed) {
          ++it;
          continue;
        }
        spdlog::warn("dismissing worker {}: heartbeats lapsed", (*it)->id());
        (*it)->kill();
        retired_.push_back(*it);
        heartbeats_->forget((*it)->id());
        it = pool.erase(it);
        ++dismissed_;
      }
      if (config_.restart_policy == RestartPolicy::kAlways) {
        while (pool.size() < config_.pools[kind].size) {
          try {
            spawn_locked(kind);
          } catch (Error const& e) {
            spdlog::error("respawn for {} failed: {}", to_string(kind), e.what());
            break;
          }
        }
      }
    }
    reap_finished_locked();
    cv_.notify_all();
    cv_.wait_for(lock, tick);
  }
}

std::size_t Master::scale(TaskKind kind, long n) {
  if (n < 0) fail(ErrorCode::kInvalidInput, fmt::format("pool size {} is negative", n));
  std::lock_guard lock(mu_);
  auto& cfg = config_.pools[kind];
  if (n > 0 && cfg.backend_id.empty()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("no backend configured for {} workers", to_string(kind)));
  }
  cfg.size = static_cast<std::size_t>(n);
  auto& pool = pools_[kind];
  while (pool.size() < cfg.size) spawn_locked(kind);
  while (pool.size() > cfg.size) {
    auto victim = std::find_if(pool.begin(), pool.end(), [](auto const& w) {
      return w->state() == WorkerState::kIdle;
    });
    if (victim == pool.end()) victim = pool.end() - 1;
    (*victim)->request_stop();
    draining_.push_back(*victim);
    pool.erase(victim);
  }
  return cfg.size;
}

void Master::hot_swap(TaskKind kind, std::string const& backend_id) {
  make_checked(backend_id, kind);
  std::vector<std::shared_ptr<Worker>> old;
  {
    std::lock_guard lock(mu_);
    config_.pools[kind].backend_id = backend_id;
    old = pools_[kind];
  }
  spdlog::info("hot swap of {} pool to {} over {} workers", to_string(kind), backend_id,
               old.size());
  for (auto const& w : old) {
    std::shared_ptr<Worker> fresh;
    {
      std::lock_guard lock(mu_);
      auto& pool = pools_[kind];
      auto it = std::find(pool.begin(), pool.end(), w);
      if (it == pool.end()) continue;
      fresh = spawn_locked(kind);
      it = std::find(pool.begin(), pool.end(), w);
      pool.erase(it);
      w->request_stop();
      draining_.push_back(w);
    }
    while (fresh->state() == WorkerState::kStarting) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    while (!w->finished()) std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

bool Master::kill_worker(std::string const& worker_id) {
  std::lock_guard lock(mu_);
  for (auto& [_, pool] : pools_) {
    for (auto const& w : pool) {
      if (w->id() == worker_id) {
        spdlog::warn("killing worker {}", worker_id);
        w->kill();
        return true;
      }
    }
  }
  return false;
}

std::vector<WorkerStatus> Master::workers() const {
  std::lock_guard lock(mu_);
  std::vector<WorkerStatus> out;
  for (auto const& [_, pool] : pools_) {
    for (auto const& w : pool) {
      auto hb = heartbeats_->last(w->id());
      out.push_back({w->id(), w->spec(), w->state(),
                     hb ? std::optional<TimePoint>(hb->at) : std::nullopt,
                     w->jobs_completed()});
    }
  }
  return out;
}

std::size_t Master::pool_size(TaskKind kind) const {
  std::lock_guard lock(mu_);
  auto it = pools_.find(kind);
  return it == pools_.end() ? 0 : it->second.size();
}

std::string Master::pool_backend(TaskKind kind) const {
  std::lock_guard lock(mu_);
  auto it = config_.pools.find(kind);
  return it == config_.pools.end() ? std::string{} : it->second.backend_id;
}

std::size_t Master::dismissed_count() const {
  std::lock_guard lock(mu_);
  return dismissed_;
}

bool Master::wait_drained(Duration timeout) {
  auto const deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(mu_);
  for (;;) {
    reap_finished_locked();
    if (draining_.empty()) return true;
    if (std::chrono::steady_clock::now() >= deadline) return false;
    cv_.wait_for(lock, std::chrono::milliseconds(10));
  }
}

void Master::stop() {
  std::vector<std::shared_ptr<Worker>> all;
  {
    std::lock_guard lock(mu_);
    if (stopping_ && !supervisor_.joinable()) return;
    stopping_ = true;
    for (auto& [_, pool] : pools_) {
      for (auto& w : pool) draining_.push_back(w);
      pool.clear();
    }
    for (auto& w : draining_) w->request_stop();
    all = draining_;
    all.insert(all.end(), retired_.begin(), retired_.end());
    draining_.clear();
    retired_.clear();
  }
  cv_.notify_all();
  if (supervisor_.joinable()) supervisor_.join();
  for (auto& w : all) w->join();
}

}  // namespace paddy::orchestrator
