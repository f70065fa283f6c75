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

#include "paddy/gateway/server.hpp"

#include <charconv>
#include <cstdlib>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"
#include "paddy/broker/remote.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"

namespace paddy::gateway {
namespace {

using nlohmann::json;

constexpr char const* kKeyHeader = "X-Broker-Key";
constexpr char const* kJson = "application/json";

void reply_error(httplib::Response& res, ErrorCode code, std::string const& message,
                 json extra = json::object()) {
  res.status = http_status(code);
  extra["error"] = to_string(code);
  extra["message"] = message;
  res.set_content(extra.dump(), kJson);
}

void reply(httplib::Response& res, int status, json const& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

template <typename Number>
Number parse_number(std::string_view text, char const* what) {
  Number v{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size()) {
    fail(ErrorCode::kInvalidInput, fmt::format("{} '{}' is not a number", what, text));
  }
  return v;
}

bool parse_flag(std::string const& text, char const* what) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  fail(ErrorCode::kInvalidInput, fmt::format("{} '{}' is not a boolean", what, text));
}

std::string bearer(httplib::Request const& req) {
  auto const header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) {
    fail(ErrorCode::kUnauthorized, "missing bearer token");
  }
  return header.substr(kPrefix.size());
}

json parse_body(httplib::Request const& req) {
  json body;
  try {
    body = json::parse(req.body);
  } catch (json::exception const&) {
    fail(ErrorCode::kInvalidInput, "request body is not valid JSON");
  }
  if (!body.is_object()) fail(ErrorCode::kInvalidInput, "request body must be a JSON object");
  return body;
}

std::string string_field(json const& body, char const* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    fail(ErrorCode::kInvalidInput, fmt::format("'{}' must be a string", key));
  }
  return it->get<std::string>();
}

std::optional<double> number_field(json const& body, char const* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(ErrorCode::kInvalidInput, fmt::format("'{}' must be a number", key));
  return it->get<double>();
}

std::optional<double> query_number(httplib::Request const& req, char const* key) {
  if (!req.has_param(key)) return std::nullopt;
  return parse_number<double>(req.get_param_value(key), key);
}

std::optional<std::string> form_field(httplib::Request const& req, char const* key) {
  if (!req.has_file(key)) return std::nullopt;
  return req.get_file_value(key).content;
}

using Handler = std::function<void(httplib::Request const&, httplib::Response&)>;

httplib::Server::Handler guarded(Handler inner) {
  return [inner = std::move(inner)](httplib::Request const& req, httplib::Response& res) {
    try {
      inner(req, res);
    } catch (Error const& e) {
      reply_error(res, e.code(), e.what());
    } catch (json::exception const& e) {
      reply_error(res, ErrorCode::kInvalidInput, e.what());
    } catch (std::exception const& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      reply_error(res, ErrorCode::kIo, "internal error");
    }
  };
}

}  // namespace

ServerConfig ServerConfig::from_env(Lookup const& lookup) {
  ServerConfig c;
  if (auto v = lookup("PADDY_LISTEN")) {
    auto const colon = v->rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::kInvalidInput, "PADDY_LISTEN must be host:port");
    c.host = v->substr(0, colon);
    c.port = parse_number<int>(std::string_view(*v).substr(colon + 1), "PADDY_LISTEN port");
    if (c.port < 0 || c.port > 65535) fail(ErrorCode::kInvalidInput, "PADDY_LISTEN port out of range");
  }
  if (auto v = lookup("PADDY_DATA_DIR")) c.data_dir = *v;
  if (auto v = lookup("PADDY_TREATMENTS")) c.treatments_path = *v;
  if (auto v = lookup("PADDY_TOKEN_TTL_SECONDS")) {
    auto const s = parse_number<long long>(*v, "PADDY_TOKEN_TTL_SECONDS");
    if (s <= 0) fail(ErrorCode::kInvalidInput, "PADDY_TOKEN_TTL_SECONDS must be positive");
    c.token_ttl = std::chrono::seconds(s);
  }
  if (auto v = lookup("PADDY_PBKDF2_ITERATIONS")) {
    c.pbkdf2_iterations = parse_number<int>(*v, "PADDY_PBKDF2_ITERATIONS");
    if (c.pbkdf2_iterations < 1) fail(ErrorCode::kInvalidInput, "PADDY_PBKDF2_ITERATIONS must be positive");
  }
  if (auto v = lookup("PADDY_BROKER_KEY")) c.broker_key = *v;
  if (auto v = lookup("PADDY_DURABLE_QUEUES")) c.durable_queues = parse_flag(*v, "PADDY_DURABLE_QUEUES");
  if (auto v = lookup("PADDY_SYNC_WRITES")) c.sync_writes = parse_flag(*v, "PADDY_SYNC_WRITES");
  if (auto v = lookup("PADDY_CORS_ORIGIN")) c.cors_origin = *v;
  return c;
}

ServerConfig ServerConfig::from_env() {
  return from_env([](std::string const& name) -> std::optional<std::string> {
    char const* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  });
}

void mount_gateway_routes(httplib::Server& server, std::shared_ptr<Gateway> gw,
                          RouteOptions const& options) {
  if (!options.cors_origin.empty()) {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/.*)", [](httplib::Request const&, httplib::Response& res) {
      res.status = 204;
    });
  }

  server.Get("/health", guarded([gw, broker = options.broker](httplib::Request const&, httplib::Response& res) {
    reply(res, 200, json{{"status", "ok"}, {"broker", broker ? broker->healthy() : true}});
  }));

  server.Post("/auth/register", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const body = parse_body(req);
    auto id = gw->register_user(string_field(body, "username"), string_field(body, "password"));
    reply(res, 201, json{{"user_id", id}});
  }));

  server.Post("/auth/login", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const body = parse_body(req);
    auto token = gw->login(string_field(body, "username"), string_field(body, "password"));
    reply(res, 200, json{{"token", token}, {"token_type", "Bearer"}});
  }));

  server.Post("/images", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const user = gw->authenticate(bearer(req));
    if (!req.is_multipart_form_data() || !req.has_file("file")) {
      fail(ErrorCode::kInvalidInput, "expected multipart form data with a 'file' part");
    }
    auto const lat = form_field(req, "lat");
    auto const lon = form_field(req, "lon");
    if (lat.has_value() != lon.has_value()) {
      fail(ErrorCode::kInvalidInput, "lat and lon must be given together");
    }
    std::optional<GeoPoint> geo;
    if (lat) geo = GeoPoint{parse_number<double>(*lat, "lat"), parse_number<double>(*lon, "lon")};
    auto const rec = gw->upload_image(user, req.get_file_value("file").content, geo);
    reply(res, 201, json{{"upload_id", rec.upload_id}, {"image_digest", rec.image_digest}});
  }));

  server.Post("/jobs", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const user = gw->authenticate(bearer(req));
    auto const body = parse_body(req);
    JobRequest r;
    r.upload_id = string_field(body, "upload_id");
    r.task_kind = orchestrator::parse_task_kind(string_field(body, "task_kind"));
    if (auto it = body.find("verify"); it != body.end()) {
      if (!it->is_boolean()) fail(ErrorCode::kInvalidInput, "'verify' must be a boolean");
      r.verify = it->get<bool>();
    }
    r.conf_threshold = number_field(body, "conf_threshold");
    r.nms_iou = number_field(body, "nms_iou");
    reply(res, 202, job_view(gw->create_job(user, r)));
  }));

  server.Get(R"(/jobs/([0-9a-f]+))", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const user = gw->authenticate(bearer(req));
    reply(res, 200, job_view(gw->job_status(user, req.matches[1])));
  }));

  server.Get(R"(/jobs/([0-9a-f]+)/result)", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    auto const user = gw->authenticate(bearer(req));
    std::string const id = req.matches[1];
    try {
      reply(res, 200, to_json(gw->get_result(user, id)));
    } catch (Error const& e) {
      if (e.code() != ErrorCode::kConflict) throw;
      auto const job = gw->job_status(user, id);
      reply_error(res, e.code(), e.what(), job_view(job));
    }
  }));

  server.Get("/outbreaks", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    gw->authenticate(bearer(req));
    GeoRect box;
    box.min_lat = query_number(req, "min_lat").value_or(box.min_lat);
    box.min_lon = query_number(req, "min_lon").value_or(box.min_lon);
    box.max_lat = query_number(req, "max_lat").value_or(box.max_lat);
    box.max_lon = query_number(req, "max_lon").value_or(box.max_lon);
    double const since = query_number(req, "since").value_or(0.0);
    if (!std::isfinite(since)) fail(ErrorCode::kInvalidInput, "'since' must be finite");
    auto const since_tp = from_unix_micros(static_cast<std::int64_t>(since * 1e6));
    json out = json::array();
    for (auto const& g : gw->list_outbreaks(box, since_tp)) out.push_back(to_json(g));
    reply(res, 200, out);
  }));

  server.Get(R"(/treatments/([a-z_]+))", guarded([gw](httplib::Request const& req, httplib::Response& res) {
    reply(res, 200, to_json(gw->treatment(std::string(req.matches[1]))));
  }));

  if (!options.broker_key.empty()) {
    if (options.broker) broker::mount_broker_routes(server, options.broker, options.broker_key);
    server.Get(R"(/internal/blobs/([0-9a-f]{64}))",
               guarded([gw, key = options.broker_key](httplib::Request const& req, httplib::Response& res) {
                 if (req.get_header_value(kKeyHeader) != key) {
                   fail(ErrorCode::kUnauthorized, "bad broker key");
                 }
                 res.set_content(gw->blobs().get(std::string(req.matches[1])),
                                 "application/octet-stream");
               }));
  }
}

GatewayServer::GatewayServer(ServerConfig config) : config_(std::move(config)) {
  std::filesystem::create_directories(config_.data_dir);
  broker::BrokerConfig bc;
  if (config_.durable_queues) bc.journal_dir = config_.data_dir / "broker";
  bc.sync_writes = config_.sync_writes;
  broker_ = std::make_shared<broker::Broker>(bc);
  blobs_ = std::make_shared<BlobStore>(config_.data_dir / "blobs");
  auto repo = std::make_shared<FileRepository>(config_.data_dir / "gateway.jsonl", config_.sync_writes);
  auto kb = config_.treatments_path.empty() ? TreatmentKb::load_bundled()
                                            : TreatmentKb::load(config_.treatments_path);
  GatewayOptions go;
  go.token_ttl = config_.token_ttl;
  go.pbkdf2_iterations = config_.pbkdf2_iterations;
  go.durable_queues = config_.durable_queues;
  gateway_ = std::make_shared<Gateway>(std::move(repo), blobs_, broker_, std::move(kb), go);

  http_ = std::make_unique<httplib::Server>();
  http_->set_payload_max_length(kMaxUploadBytes + 1024 * 1024);
  mount_gateway_routes(*http_, gateway_, {broker_, config_.broker_key, config_.cors_origin});
}

GatewayServer::~GatewayServer() { stop(); }

void GatewayServer::start() {
  port_ = config_.port == 0 ? http_->bind_to_any_port(config_.host)
                            : (http_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port_ < 0) {
    fail(ErrorCode::kUnavailable, fmt::format("cannot bind {}:{}", config_.host, config_.port));
  }
  gateway_->start_consumer();
  listener_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  spdlog::info("gateway listening on {}:{}", config_.host, port_);
}

void GatewayServer::stop() {
  if (http_) http_->stop();
  if (listener_.joinable()) listener_.join();
  if (gateway_) gateway_->stop_consumer();
}

void GatewayServer::wait() {
  if (listener_.joinable()) listener_.join();
}

std::function<std::string(std::string const&)> remote_image_source(std::string host, int port,
                                                                   std::string broker_key) {
  return [host = std::move(host), port, key = std::move(broker_key)](std::string const& digest) {
    if (!is_sha256_hex(digest)) fail(ErrorCode::kInvalidInput, "bad image digest");
    httplib::Client client(host, port);
    client.set_connection_timeout(std::chrono::seconds(5));
    client.set_read_timeout(std::chrono::seconds(30));
    auto res = client.Get("/internal/blobs/" + digest, {{kKeyHeader, key}});
    if (!res) {
      fail(ErrorCode::kUnavailable, fmt::format("gateway unreachable: {}", httplib::to_string(res.error())));
    }
    if (res->status == 200) return res->body;
    ErrorCode code = ErrorCode::kIo;
    try {
      if (auto parsed = parse_error_code(json::parse(res->body).at("error").get<std::string>())) code = *parsed;
    } catch (json::exception const&) {
    }
    fail(code, fmt::format("image fetch returned HTTP {}", res->status));
  };
}

}  // namespace paddy::gateway
