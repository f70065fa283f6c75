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
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "paddy/core/clock.hpp"

namespace paddy::broker {

inline constexpr std::string_view kDeadSuffix = ".dead";

struct Envelope {
  std::uint64_t message_id = 0;
  std::string queue;
  std::string payload;
  /// 1 on first delivery, incremented on every redelivery.
  int delivery_count = 0;
  TimePoint enqueued_at;
};

struct Lease {
  std::uint64_t lease_id = 0;
  std::uint64_t message_id = 0;
  std::string queue;
  std::string consumer_id;
  TimePoint expires_at;
};

struct Delivery {
  Envelope envelope;
  Lease lease;
};

/// Conservation for a queue: published = acked + ready + leased +
/// dead_lettered. Arrivals from a companion queue count as published.
struct QueueStats {
  std::size_t ready = 0;
  std::size_t leased = 0;
  std::uint64_t published = 0;
  std::uint64_t acked = 0;
  std::uint64_t dead_lettered = 0;
  bool durable = false;
};

/// At-least-once queue contract shared by the in-process broker and its
/// HTTP client.
class MessageBroker {
 public:
  virtual ~MessageBroker() = default;

  /// Idempotent. Also declares the "<name>.dead" companion. Throws
  /// InvalidInput unless name matches [a-z0-9_.-]{1,64}.
  virtual void declare_queue(std::string const& name, bool durable = false) = 0;
  /// Throws NotFound for an undeclared queue.
  virtual std::uint64_t publish(std::string const& queue, std::string payload) = 0;
  /// Leases the oldest ready message, or returns nothing.
  virtual std::optional<Delivery> consume(
      std::string const& queue, std::string const& consumer_id,
      std::optional<Duration> lease_duration = std::nullopt) = 0;
  /// As consume, waiting up to `timeout` for a message.
  virtual std::optional<Delivery> consume_wait(
      std::string const& queue, std::string const& consumer_id,
      Duration timeout, std::optional<Duration> lease_duration = std::nullopt) = 0;
  /// Both throw LeaseInvalid for an expired, settled or foreign lease.
  virtual void ack(Lease const& lease) = 0;
  /// With requeue the message returns to the head of the queue unless it
  /// has used up its deliveries; without requeue it is dead-lettered.
  /// Messages on a dead-letter queue are always requeued.
  virtual void nack(Lease const& lease, bool requeue) = 0;
  virtual QueueStats stats(std::string const& queue) = 0;
  virtual bool healthy() = 0;
};

struct BrokerConfig {
  Duration default_lease = std::chrono::seconds(30);
  int max_deliveries = 5;
  /// Journal directory for durable queues; empty disables durability.
  std::filesystem::path journal_dir;
  /// fdatasync after every journal record.
  bool sync_writes = false;
};

bool valid_queue_name(std::string_view name);

class Journal;

class Broker final : public MessageBroker {
 public:
  explicit Broker(BrokerConfig config = {},
                  std::shared_ptr<Clock> clock = system_clock());
  ~Broker() override;
  Broker(Broker const&) = delete;
  Broker& operator=(Broker const&) = delete;

  void declare_queue(std::string const& name, bool durable = false) override;
  std::uint64_t publish(std::string const& queue, std::string payload) override;
  std::optional<Delivery> consume(
      std::string const& queue, std::string const& consumer_id,
      std::optional<Duration> lease_duration = std::nullopt) override;
  std::optional<Delivery> consume_wait(
      std::string const& queue, std::string const& consumer_id,
      Duration timeout, std::optional<Duration> lease_duration = std::nullopt) override;
  void ack(Lease const& lease) override;
  void nack(Lease const& lease, bool requeue) override;
  QueueStats stats(std::string const& queue) override;
  bool healthy() override;

  std::vector<std::string> queue_names();
  /// Returns expired leases to their queues now rather than lazily.
  void reap_expired();
  /// Wakes waiters; every later call throws Unavailable.
  void shutdown();

  BrokerConfig const& config() const { return config_; }

 private:
  struct Message {
    std::uint64_t id = 0;
    std::string payload;
    TimePoint enqueued_at;
    int deliveries = 0;
  };
  struct ActiveLease {
    std::uint64_t lease_id = 0;
    std::string consumer_id;
    TimePoint expires_at;
  };
  struct Queue {
    std::string name;
    bool durable = false;
    bool is_dead = false;
    std::deque<std::uint64_t> ready;
    std::unordered_map<std::uint64_t, Message> messages;
    std::map<std::uint64_t, ActiveLease> leases;
    QueueStats counters;
    std::unique_ptr<Journal> journal;
  };
  struct Replayed;

  Queue& queue_locked(std::string const& name);
  void declare_locked(std::string const& name, bool durable, bool is_dead);
  void require_open_locked() const;
  void reap_locked(Queue& q, TimePoint now);
  void settle_failed_locked(Queue& q, std::uint64_t id, bool requeue);
  void dead_letter_locked(Queue& q, std::uint64_t id);
  std::optional<Delivery> take_locked(Queue& q, std::string const& consumer_id,
                                      Duration lease_duration);
  std::uint64_t enqueue_locked(Queue& q, std::string payload, TimePoint at,
                               int deliveries);

  BrokerConfig config_;
  std::shared_ptr<Clock> clock_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool closed_ = false;
  std::uint64_t next_message_id_ = 1;
  std::uint64_t next_lease_id_ = 1;
  std::map<std::string, Queue> queues_;
  std::map<std::string, std::unique_ptr<Replayed>> replayed_;
};

}  // namespace paddy::broker
