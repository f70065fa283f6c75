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

#include "paddy/broker/broker.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "journal.hpp"
#include "paddy/core/error.hpp"

namespace paddy::broker {

struct Broker::Replayed {
  std::vector<Message> messages;
};

namespace {

constexpr std::string_view kJournalExt = ".journal";

}  // namespace

bool valid_queue_name(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '.' || c == '-';
  });
}

Broker::Broker(BrokerConfig config, std::shared_ptr<Clock> clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  if (!clock_) fail(ErrorCode::kInvalidInput, "broker needs a clock");
  if (config_.max_deliveries < 1) {
    fail(ErrorCode::kInvalidInput, "max_deliveries must be at least 1");
  }
  if (config_.default_lease <= Duration::zero()) {
    fail(ErrorCode::kInvalidInput, "default lease must be positive");
  }
  if (config_.journal_dir.empty()) return;

  std::filesystem::create_directories(config_.journal_dir);
  std::uint64_t max_id = 0;
  for (auto const& entry : std::filesystem::directory_iterator(config_.journal_dir)) {
    auto const file = entry.path().filename().string();
    if (!entry.is_regular_file() || !file.ends_with(kJournalExt)) continue;
    std::string const name = file.substr(0, file.size() - kJournalExt.size());

    auto contents = Journal::read(entry.path());
    std::vector<Message> order;
    std::unordered_map<std::uint64_t, std::size_t> index;
    std::vector<bool> live;
    for (auto& r : contents.records) {
      max_id = std::max(max_id, r.message_id);
      auto it = index.find(r.message_id);
      switch (r.op) {
        case JournalOp::kEnqueue:
          index[r.message_id] = order.size();
          order.push_back({r.message_id, std::move(r.payload),
                           from_unix_micros(r.enqueued_at_us), 0});
          live.push_back(true);
          break;
        case JournalOp::kDeliver:
          if (it != index.end()) ++order[it->second].deliveries;
          break;
        case JournalOp::kAck:
        case JournalOp::kDead:
          if (it != index.end()) live[it->second] = false;
          break;
      }
    }
    auto replayed = std::make_unique<Replayed>();
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (live[i]) replayed->messages.push_back(std::move(order[i]));
    }
    replayed_[name] = std::move(replayed);
  }
  next_message_id_ = max_id + 1;
}

Broker::~Broker() = default;

void Broker::require_open_locked() const {
  if (closed_) fail(ErrorCode::kUnavailable, "broker is shut down");
}

void Broker::declare_queue(std::string const& name, bool durable) {
  if (!valid_queue_name(name)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("queue name '{}' must match [a-z0-9_.-]{{1,64}}", name));
  }
  std::lock_guard lock(mu_);
  require_open_locked();
  declare_locked(name, durable, false);
  declare_locked(name + std::string(kDeadSuffix), durable, true);
}

void Broker::declare_locked(std::string const& name, bool durable, bool is_dead) {
  if (queues_.contains(name)) return;
  Queue& q = queues_[name];
  q.name = name;
  q.is_dead = is_dead;
  q.durable = durable && !config_.journal_dir.empty();
  q.counters.durable = q.durable;
  if (!q.durable) return;

  auto const path = config_.journal_dir / (name + std::string(kJournalExt));
  std::vector<JournalRecord> compacted;
  if (auto it = replayed_.find(name); it != replayed_.end()) {
    for (auto& m : it->second->messages) {
      compacted.push_back({JournalOp::kEnqueue, m.id, to_unix_micros(m.enqueued_at), m.payload});
      for (int i = 0; i < m.deliveries; ++i) {
        compacted.push_back({JournalOp::kDeliver, m.id, 0, {}});
      }
      q.ready.push_back(m.id);
      ++q.counters.published;
      q.messages.emplace(m.id, std::move(m));
    }
    replayed_.erase(it);
  }
  Journal::rewrite(path, compacted);
  q.journal = std::make_unique<Journal>(path, config_.sync_writes);
}

Broker::Queue& Broker::queue_locked(std::string const& name) {
  auto it = queues_.find(name);
  if (it == queues_.end()) {
    fail(ErrorCode::kNotFound, fmt::format("queue '{}' is not declared", name));
  }
  return it->second;
}

std::uint64_t Broker::enqueue_locked(Queue& q, std::string payload, TimePoint at,
                                     int deliveries) {
  std::uint64_t const id = next_message_id_++;
  if (q.journal) {
    q.journal->append({JournalOp::kEnqueue, id, to_unix_micros(at), payload});
  }
  q.messages.emplace(id, Message{id, std::move(payload), at, deliveries});
  q.ready.push_back(id);
  ++q.counters.published;
  return id;
}

std::uint64_t Broker::publish(std::string const& queue, std::string payload) {
  std::uint64_t id = 0;
  {
    std::lock_guard lock(mu_);
    require_open_locked();
    Queue& q = queue_locked(queue);
    id = enqueue_locked(q, std::move(payload), clock_->now(), 0);
  }
  cv_.notify_all();
  return id;
}

void Broker::reap_locked(Queue& q, TimePoint now) {
  std::vector<std::uint64_t> expired;
  for (auto const& [id, lease] : q.leases) {
    if (lease.expires_at <= now) expired.push_back(id);
  }
  // Descending so that pushes to the head leave the oldest first.
  std::sort(expired.rbegin(), expired.rend());
  for (auto id : expired) {
    q.leases.erase(id);
    settle_failed_locked(q, id, true);
  }
}

void Broker::dead_letter_locked(Queue& q, std::uint64_t id) {
  auto node = q.messages.extract(id);
  ++q.counters.dead_lettered;
  if (q.journal) q.journal->append({JournalOp::kDead, id, 0, {}});
  Queue& dead = queue_locked(q.name + std::string(kDeadSuffix));
  enqueue_locked(dead, std::move(node.mapped().payload), node.mapped().enqueued_at, 0);
}

void Broker::settle_failed_locked(Queue& q, std::uint64_t id, bool requeue) {
  Message const& m = q.messages.at(id);
  if (!q.is_dead && (!requeue || m.deliveries >= config_.max_deliveries)) {
    dead_letter_locked(q, id);
    return;
  }
  q.ready.push_front(id);
}

std::optional<Delivery> Broker::take_locked(Queue& q, std::string const& consumer_id,
                                            Duration lease_duration) {
  if (q.ready.empty()) return std::nullopt;
  std::uint64_t const id = q.ready.front();
  q.ready.pop_front();
  Message& m = q.messages.at(id);
  ++m.deliveries;
  if (q.journal) q.journal->append({JournalOp::kDeliver, id, 0, {}});
  TimePoint const expires = clock_->now() + lease_duration;
  std::uint64_t const lease_id = next_lease_id_++;
  q.leases[id] = {lease_id, consumer_id, expires};
  return Delivery{{id, q.name, m.payload, m.deliveries, m.enqueued_at},
                  {lease_id, id, q.name, consumer_id, expires}};
}

std::optional<Delivery> Broker::consume(std::string const& queue,
                                        std::string const& consumer_id,
                                        std::optional<Duration> lease_duration) {
  Duration const d = lease_duration.value_or(config_.default_lease);
  if (d <= Duration::zero()) fail(ErrorCode::kInvalidInput, "lease must be positive");
  std::lock_guard lock(mu_);
  require_open_locked();
  Queue& q = queue_locked(queue);
  reap_locked(q, clock_->now());
  return take_locked(q, consumer_id, d);
}

std::optional<Delivery> Broker::consume_wait(std::string const& queue,
                                             std::string const& consumer_id,
                                             Duration timeout,
                                             std::optional<Duration> lease_duration) {
  Duration const d = lease_duration.value_or(config_.default_lease);
  if (d <= Duration::zero()) fail(ErrorCode::kInvalidInput, "lease must be positive");
  auto const deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(mu_);
  for (;;) {
    require_open_locked();
    Queue& q = queue_locked(queue);
    reap_locked(q, clock_->now());
    if (auto got = take_locked(q, consumer_id, d)) return got;
    auto const now = std::chrono::steady_clock::now();
    if (now >= deadline) return std::nullopt;
    // Lease expiry follows the injected clock, so re-check periodically.
    cv_.wait_for(lock, std::min<std::chrono::steady_clock::duration>(
                           deadline - now, std::chrono::milliseconds(50)));
  }
}

void Broker::ack(Lease const& lease) {
  std::lock_guard lock(mu_);
  require_open_locked();
  Queue& q = queue_locked(lease.queue);
  reap_locked(q, clock_->now());
  auto it = q.leases.find(lease.message_id);
  if (it == q.leases.end() || it->second.lease_id != lease.lease_id) {
    fail(ErrorCode::kLeaseInvalid,
         fmt::format("lease {} on message {} is not active", lease.lease_id,
                     lease.message_id));
  }
  q.leases.erase(it);
  q.messages.erase(lease.message_id);
  ++q.counters.acked;
  if (q.journal) q.journal->append({JournalOp::kAck, lease.message_id, 0, {}});
}

void Broker::nack(Lease const& lease, bool requeue) {
  {
    std::lock_guard lock(mu_);
    require_open_locked();
    Queue& q = queue_locked(lease.queue);
    reap_locked(q, clock_->now());
    auto it = q.leases.find(lease.message_id);
    if (it == q.leases.end() || it->second.lease_id != lease.lease_id) {
      fail(ErrorCode::kLeaseInvalid,
           fmt::format("lease {} on message {} is not active", lease.lease_id,
                       lease.message_id));
    }
    q.leases.erase(it);
    settle_failed_locked(q, lease.message_id, requeue);
  }
  cv_.notify_all();
}

QueueStats Broker::stats(std::string const& queue) {
  std::lock_guard lock(mu_);
  require_open_locked();
  Queue& q = queue_locked(queue);
  reap_locked(q, clock_->now());
  QueueStats s = q.counters;
  s.ready = q.ready.size();
  s.leased = q.leases.size();
  return s;
}

bool Broker::healthy() {
  std::lock_guard lock(mu_);
  return !closed_;
}

std::vector<std::string> Broker::queue_names() {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (auto const& [name, _] : queues_) out.push_back(name);
  return out;
}

void Broker::reap_expired() {
  {
    std::lock_guard lock(mu_);
    require_open_locked();
    auto const now = clock_->now();
    for (auto& [_, q] : queues_) reap_locked(q, now);
  }
  cv_.notify_all();
}

void Broker::shutdown() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

}  // namespace paddy::broker
