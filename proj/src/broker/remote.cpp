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

#include "paddy/broker/remote.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "httplib.h"
#include "json.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"

namespace paddy::broker {
namespace {

using nlohmann::json;
using std::chrono::milliseconds;

constexpr char const* kKeyHeader = "X-Broker-Key";
constexpr milliseconds kMaxWaitRound{1000};

json lease_to_json(Lease const& l) {
  return {{"lease_id", l.lease_id},
          {"message_id", l.message_id},
          {"queue", l.queue},
          {"consumer_id", l.consumer_id},
          {"expires_at_us", to_unix_micros(l.expires_at)}};
}

Lease lease_from_json(json const& j) {
  return {j.at("lease_id").get<std::uint64_t>(), j.at("message_id").get<std::uint64_t>(),
          j.at("queue").get<std::string>(), j.at("consumer_id").get<std::string>(),
          from_unix_micros(j.at("expires_at_us").get<std::int64_t>())};
}

json delivery_to_json(Delivery const& d) {
  return {{"message_id", d.envelope.message_id},
          {"queue", d.envelope.queue},
          {"payload_b64", base64_encode(d.envelope.payload)},
          {"delivery_count", d.envelope.delivery_count},
          {"enqueued_at_us", to_unix_micros(d.envelope.enqueued_at)},
          {"lease", lease_to_json(d.lease)}};
}

Delivery delivery_from_json(json const& j) {
  Delivery d;
  d.envelope.message_id = j.at("message_id").get<std::uint64_t>();
  d.envelope.queue = j.at("queue").get<std::string>();
  d.envelope.payload = base64_decode(j.at("payload_b64").get<std::string>());
  d.envelope.delivery_count = j.at("delivery_count").get<int>();
  d.envelope.enqueued_at = from_unix_micros(j.at("enqueued_at_us").get<std::int64_t>());
  d.lease = lease_from_json(j.at("lease"));
  return d;
}

std::optional<Duration> lease_from_ms(json const& body) {
  if (!body.contains("lease_ms")) return std::nullopt;
  return std::chrono::duration_cast<Duration>(milliseconds(body.at("lease_ms").get<std::int64_t>()));
}

void reply_error(httplib::Response& res, ErrorCode code, std::string const& message) {
  res.status = http_status(code);
  res.set_content(json{{"error", to_string(code)}, {"message", message}}.dump(),
                  "application/json");
}

using Handler = std::function<json(json const&)>;

}  // namespace

void mount_broker_routes(httplib::Server& server, std::shared_ptr<MessageBroker> broker,
                         std::string api_key) {
  auto route = [&server, api_key](std::string const& path, Handler handler) {
    server.Post(path, [api_key, handler](httplib::Request const& req,
                                         httplib::Response& res) {
      if (req.get_header_value(kKeyHeader) != api_key) {
        reply_error(res, ErrorCode::kUnauthorized, "bad broker key");
        return;
      }
      try {
        json const body = req.body.empty() ? json::object() : json::parse(req.body);
        json out = handler(body);
        if (out.is_null()) {
          res.status = 204;
          return;
        }
        res.set_content(out.dump(), "application/json");
      } catch (Error const& e) {
        reply_error(res, e.code(), e.what());
      } catch (json::exception const& e) {
        reply_error(res, ErrorCode::kInvalidInput, e.what());
      }
    });
  };
  route("/internal/broker/declare", [broker](json const& b) {
    broker->declare_queue(b.at("queue").get<std::string>(), b.value("durable", false));
    return json::object();
  });
  route("/internal/broker/publish", [broker](json const& b) {
    auto id = broker->publish(b.at("queue").get<std::string>(),
                              base64_decode(b.at("payload_b64").get<std::string>()));
    return json{{"message_id", id}};
  });
  route("/internal/broker/consume", [broker](json const& b) -> json {
    auto const queue = b.at("queue").get<std::string>();
    auto const consumer = b.at("consumer_id").get<std::string>();
    milliseconds const wait{std::clamp<std::int64_t>(b.value("wait_ms", std::int64_t{0}), 0,
                                                     kMaxWaitRound.count())};
    auto got = wait.count() > 0
                   ? broker->consume_wait(queue, consumer, wait, lease_from_ms(b))
                   : broker->consume(queue, consumer, lease_from_ms(b));
    if (!got) return nullptr;
    return delivery_to_json(*got);
  });
  route("/internal/broker/ack", [broker](json const& b) {
    broker->ack(lease_from_json(b.at("lease")));
    return json::object();
  });
  route("/internal/broker/nack", [broker](json const& b) {
    broker->nack(lease_from_json(b.at("lease")), b.at("requeue").get<bool>());
    return json::object();
  });
  route("/internal/broker/stats", [broker](json const& b) {
    auto s = broker->stats(b.at("queue").get<std::string>());
    return json{{"ready", s.ready},         {"leased", s.leased},
                {"published", s.published}, {"acked", s.acked},
                {"dead_lettered", s.dead_lettered}, {"durable", s.durable}};
  });
  route("/internal/broker/health", [broker](json const&) {
    if (!broker->healthy()) fail(ErrorCode::kUnavailable, "broker is shut down");
    return json{{"ok", true}};
  });
}

struct RemoteBroker::Impl {
  std::string host;
  int port;
  std::string api_key;
  milliseconds timeout;

  json call(std::string const& path, json const& body) {
    httplib::Client client(host, port);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout + kMaxWaitRound);
    client.set_write_timeout(timeout);
    httplib::Headers headers{{kKeyHeader, api_key}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      fail(ErrorCode::kUnavailable,
           fmt::format("broker unreachable: {}", httplib::to_string(res.error())));
    }
    if (res->status == 204) return nullptr;
    json out;
    try {
      out = json::parse(res->body);
    } catch (json::exception const&) {
      fail(ErrorCode::kUnavailable, fmt::format("broker replied {}", res->status));
    }
    if (res->status >= 300) {
      auto const code = parse_error_code(out.value("error", std::string{}));
      fail(code.value_or(ErrorCode::kUnavailable), out.value("message", std::string{}));
    }
    return out;
  }
};

RemoteBroker::RemoteBroker(std::string host, int port, std::string api_key,
                           milliseconds timeout)
    : impl_(std::make_unique<Impl>(Impl{std::move(host), port, std::move(api_key), timeout})) {}

RemoteBroker::~RemoteBroker() = default;

void RemoteBroker::declare_queue(std::string const& name, bool durable) {
  impl_->call("/internal/broker/declare", {{"queue", name}, {"durable", durable}});
}

std::uint64_t RemoteBroker::publish(std::string const& queue, std::string payload) {
  return impl_->call("/internal/broker/publish",
                     {{"queue", queue}, {"payload_b64", base64_encode(payload)}})
      .at("message_id")
      .get<std::uint64_t>();
}

std::optional<Delivery> RemoteBroker::consume(std::string const& queue,
                                              std::string const& consumer_id,
                                              std::optional<Duration> lease_duration) {
  return consume_wait(queue, consumer_id, Duration::zero(), lease_duration);
}

std::optional<Delivery> RemoteBroker::consume_wait(std::string const& queue,
                                                   std::string const& consumer_id,
                                                   Duration timeout,
                                                   std::optional<Duration> lease_duration) {
  auto const deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto const left = std::chrono::duration_cast<milliseconds>(
        deadline - std::chrono::steady_clock::now());
    json body{{"queue", queue},
              {"consumer_id", consumer_id},
              {"wait_ms", std::clamp(left, milliseconds(0), kMaxWaitRound).count()}};
    if (lease_duration) {
      body["lease_ms"] = std::chrono::duration_cast<milliseconds>(*lease_duration).count();
    }
    json out = impl_->call("/internal/broker/consume", body);
    if (!out.is_null()) return delivery_from_json(out);
    if (std::chrono::steady_clock::now() >= deadline) return std::nullopt;
  }
}

void RemoteBroker::ack(Lease const& lease) {
  impl_->call("/internal/broker/ack", {{"lease", lease_to_json(lease)}});
}

void RemoteBroker::nack(Lease const& lease, bool requeue) {
  impl_->call("/internal/broker/nack", {{"lease", lease_to_json(lease)}, {"requeue", requeue}});
}

QueueStats RemoteBroker::stats(std::string const& queue) {
  json out = impl_->call("/internal/broker/stats", {{"queue", queue}});
  QueueStats s;
  s.ready = out.at("ready").get<std::size_t>();
  s.leased = out.at("leased").get<std::size_t>();
  s.published = out.at("published").get<std::uint64_t>();
  s.acked = out.at("acked").get<std::uint64_t>();
  s.dead_lettered = out.at("dead_lettered").get<std::uint64_t>();
  s.durable = out.at("durable").get<bool>();
  return s;
}

bool RemoteBroker::healthy() {
  try {
    impl_->call("/internal/broker/health", json::object());
    return true;
  } catch (Error const&) {
    return false;
  }
}

}  // namespace paddy::broker
