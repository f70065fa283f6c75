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

#include "paddy/gateway/service.hpp"

#include <cmath>
#include <ctime>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::gateway {

using nlohmann::json;
using orchestrator::JobMessage;
using orchestrator::ResultMessage;
using orchestrator::TaskKind;

namespace {

constexpr TaskKind kKinds[] = {TaskKind::kClassification, TaskKind::kDetection};

std::string iso8601(TimePoint t) {
  auto const secs = std::chrono::floor<std::chrono::seconds>(t);
  auto const millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(t - secs).count();
  std::time_t const tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900,
                     tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
}

void check_unit_interval(std::optional<double> v, char const* name) {
  if (v && !(*v > 0 && *v < 1)) {
    fail(ErrorCode::kInvalidInput, fmt::format("{} must lie strictly between 0 and 1", name));
  }
}

}  // namespace

json to_json(TreatmentView const& t) {
  return json{{"class", t.slug},
              {"name", disease_class(t.entry.class_index).display_name},
              {"summary", t.entry.summary},
              {"actions", t.entry.actions}};
}

json to_json(DiagnosisResult const& r) {
  json dets = json::array();
  for (auto const& d : r.detections) dets.push_back(inference::to_json(d));
  json treatments = json::array();
  for (auto const& t : r.treatments) treatments.push_back(to_json(t));
  json j{{"job_id", r.job_id},
         {"backend_id", r.backend_id},
         {"detections", std::move(dets)},
         {"classification", nullptr},
         {"treatments", std::move(treatments)}};
  if (r.classification) j["classification"] = inference::to_json(*r.classification);
  return j;
}

json to_json(OutbreakGroup const& g) {
  return json{{"class", index_to_slug(g.class_index)},
              {"count", g.count},
              {"centroid", {{"lat", g.centroid.latitude}, {"lon", g.centroid.longitude}}}};
}

json job_view(JobRecord const& job) {
  json j{{"job_id", job.job_id},
         {"upload_id", job.upload_id},
         {"task_kind", orchestrator::to_string(job.task_kind)},
         {"verify", job.verify},
         {"status", to_string(job.status)},
         {"created_at", iso8601(job.created_at)},
         {"updated_at", iso8601(job.updated_at)}};
  if (job.result_ref) j["result_ref"] = *job.result_ref;
  if (job.error) j["error"] = *job.error;
  return j;
}

Gateway::Gateway(std::shared_ptr<Repository> repo, std::shared_ptr<BlobStore> blobs,
                 std::shared_ptr<broker::MessageBroker> broker, TreatmentKb treatments,
                 GatewayOptions options, std::shared_ptr<Clock> clock)
    : repo_(std::move(repo)),
      blobs_(std::move(blobs)),
      broker_(std::move(broker)),
      treatments_(std::move(treatments)),
      options_(options),
      clock_(std::move(clock)),
      dummy_hash_(hash_password("not-a-real-password", options.pbkdf2_iterations)),
      consumer_id_("gateway-" + new_id().substr(0, 8)) {
  for (auto kind : kKinds) {
    broker_->declare_queue(orchestrator::job_queue(kind), options_.durable_queues);
  }
  broker_->declare_queue(orchestrator::kResultsQueue, options_.durable_queues);
}

Gateway::~Gateway() { stop_consumer(); }

std::string Gateway::register_user(std::string const& username, std::string const& password) {
  if (!valid_username(username)) {
    fail(ErrorCode::kInvalidInput, "username must match [a-z0-9_]{3,32}");
  }
  if (!valid_password(password)) {
    fail(ErrorCode::kInvalidInput, "password must be at least 8 characters");
  }
  UserAccount user{new_id(), username, hash_password(password, options_.pbkdf2_iterations),
                   clock_->now()};
  repo_->insert_user(user);
  return user.user_id;
}

std::string Gateway::login(std::string const& username, std::string const& password) {
  auto const user = repo_->user_by_name(username);
  // Unknown names cost the same derivation as wrong passwords.
  bool const ok = verify_password(password, user ? user->credential_hash : dummy_hash_);
  if (!user || !ok) fail(ErrorCode::kUnauthorized, "invalid credentials");
  std::string token = new_token();
  repo_->insert_token({token_digest(token), user->user_id, clock_->now() + options_.token_ttl});
  return token;
}

std::string Gateway::authenticate(std::string_view token) const {
  if (token.empty()) fail(ErrorCode::kUnauthorized, "missing bearer token");
  auto const record = repo_->token(token_digest(token));
  if (!record || clock_->now() >= record->expires_at) {
    fail(ErrorCode::kUnauthorized, "invalid or expired token");
  }
  return record->user_id;
}

UploadRecord Gateway::upload_image(std::string const& user_id, std::string_view bytes,
                                   std::optional<GeoPoint> geo) {
  if (bytes.size() > options_.max_upload_bytes) {
    fail(ErrorCode::kPayloadTooLarge,
         fmt::format("upload of {} bytes exceeds {} bytes", bytes.size(), options_.max_upload_bytes));
  }
  if (geo && !geo->valid()) fail(ErrorCode::kInvalidInput, "latitude or longitude out of range");
  auto const format = sniff_format(bytes);
  if (format != ImageFormat::kPng && format != ImageFormat::kJpeg) {
    fail(ErrorCode::kUnsupportedMedia, "only JPEG and PNG images are accepted");
  }
  decode_image(bytes);
  UploadRecord rec;
  rec.upload_id = new_id();
  rec.owner = user_id;
  rec.image_digest = blobs_->put(bytes);
  rec.stored_path = blobs_->path_for(rec.image_digest).string();
  rec.geo = geo;
  rec.created_at = clock_->now();
  repo_->insert_upload(rec);
  return rec;
}

JobRecord Gateway::create_job(std::string const& user_id, JobRequest const& request) {
  check_unit_interval(request.conf_threshold, "conf_threshold");
  check_unit_interval(request.nms_iou, "nms_iou");
  auto const upload = repo_->upload(request.upload_id);
  if (!upload) fail(ErrorCode::kNotFound, "no such upload");
  if (upload->owner != user_id) fail(ErrorCode::kForbidden, "upload belongs to another user");

  JobRecord job;
  job.job_id = new_id();
  job.owner = user_id;
  job.upload_id = upload->upload_id;
  job.task_kind = request.task_kind;
  job.verify = request.verify;
  job.conf_threshold = request.conf_threshold;
  job.nms_iou = request.nms_iou;
  job.created_at = job.updated_at = clock_->now();
  repo_->insert_job(job);

  JobMessage msg{job.job_id, upload->image_digest, job.task_kind, job.verify,
                 job.conf_threshold, job.nms_iou};
  try {
    broker_->publish(orchestrator::job_queue(job.task_kind), msg.serialize());
  } catch (Error const& e) {
    repo_->update_job(job.job_id, [&](JobRecord& j) {
      j.status = JobStatus::kFailed;
      j.error = std::string("dispatch failed: ") + e.what();
      j.updated_at = clock_->now();
      return true;
    });
    fail(ErrorCode::kUnavailable, "job queue unavailable");
  }
  return job;
}

JobRecord Gateway::owned_job(std::string const& user_id, std::string const& job_id) const {
  auto job = repo_->job(job_id);
  if (!job) fail(ErrorCode::kNotFound, "no such job");
  if (job->owner != user_id) fail(ErrorCode::kForbidden, "job belongs to another user");
  return *job;
}

JobRecord Gateway::job_status(std::string const& user_id, std::string const& job_id) const {
  return owned_job(user_id, job_id);
}

DiagnosisResult Gateway::get_result(std::string const& user_id, std::string const& job_id) const {
  auto const job = owned_job(user_id, job_id);
  if (job.status != JobStatus::kDone) {
    fail(ErrorCode::kConflict, fmt::format("job is {}", to_string(job.status)));
  }
  auto const stored = repo_->result(*job.result_ref);
  if (!stored) fail(ErrorCode::kIo, "result record missing for a done job");
  DiagnosisResult r{stored->job_id, stored->backend_id, stored->detections,
                    stored->classification, {}};
  for (int c : stored->classes_present()) {
    r.treatments.push_back({std::string(index_to_slug(c)), treatments_.treatment_for(c)});
  }
  return r;
}

std::vector<OutbreakGroup> Gateway::list_outbreaks(GeoRect const& bbox, TimePoint since) const {
  for (double v : {bbox.min_lat, bbox.max_lat, bbox.min_lon, bbox.max_lon}) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidInput, "bounding box must be finite");
  }
  if (!GeoPoint{bbox.min_lat, bbox.min_lon}.valid() ||
      !GeoPoint{bbox.max_lat, bbox.max_lon}.valid()) {
    fail(ErrorCode::kInvalidInput, "bounding box outside the globe");
  }
  if (bbox.min_lat > bbox.max_lat || bbox.min_lon > bbox.max_lon) {
    fail(ErrorCode::kInvalidInput, "bounding box corners are inverted");
  }
  struct Acc {
    std::size_t n = 0;
    double lat = 0, lon = 0;
  };
  std::map<int, Acc> groups;
  for (auto const& r : repo_->outbreaks()) {
    if (r.observed_at < since || !bbox.contains(r.geo)) continue;
    auto& a = groups[r.class_index];
    ++a.n;
    a.lat += r.geo.latitude;
    a.lon += r.geo.longitude;
  }
  std::vector<OutbreakGroup> out;
  for (auto const& [cls, a] : groups) {
    double const n = static_cast<double>(a.n);
    out.push_back({cls, a.n, {a.lat / n, a.lon / n}});
  }
  return out;
}

TreatmentView Gateway::treatment(std::string_view slug) const {
  int const c = class_index(slug);
  return {std::string(slug), treatments_.treatment_for(c)};
}

bool Gateway::apply_result(ResultMessage const& m) {
  auto const job = repo_->job(m.job_id);
  if (!job) {
    spdlog::warn("result for unknown job {} dropped", m.job_id);
    return false;
  }
  auto const now = clock_->now();
  if (m.progress) {
    return repo_->update_job(m.job_id, [&](JobRecord& j) {
      if (j.status != JobStatus::kQueued) return false;
      j.status = JobStatus::kProcessing;
      j.updated_at = now;
      return true;
    });
  }
  bool const shape_ok =
      job->task_kind != TaskKind::kClassification || m.classification.has_value();
  if (m.error || !shape_ok) {
    std::string const reason = m.error ? *m.error : "classification result missing";
    return repo_->update_job(m.job_id, [&](JobRecord& j) {
      if (is_terminal(j.status)) return false;
      j.status = JobStatus::kFailed;
      j.error = reason;
      j.updated_at = now;
      return true;
    });
  }

  StoredResult stored{m.job_id, m.backend_id, m.worker_id, m.detections, m.classification, now};
  std::vector<OutbreakReport> reports;
  auto const upload = repo_->upload(job->upload_id);
  if (upload && upload->geo) {
    for (int c : stored.classes_present()) {
      if (c == kNormalIndex) continue;
      reports.push_back({fmt::format("{}:{}", m.job_id, index_to_slug(c)), m.job_id, c,
                         *upload->geo, now});
    }
  }
  return repo_->complete_job(stored, reports);
}

bool Gateway::apply_dead_letter(JobMessage const& m) {
  if (!repo_->job(m.job_id)) return false;
  auto const now = clock_->now();
  return repo_->update_job(m.job_id, [&](JobRecord& j) {
    if (is_terminal(j.status)) return false;
    j.status = JobStatus::kFailed;
    j.error = "delivery attempts exhausted";
    j.updated_at = now;
    return true;
  });
}

std::size_t Gateway::drain_dead(std::string const& queue) {
  std::size_t handled = 0;
  while (auto d = broker_->consume(queue, consumer_id_)) {
    try {
      apply_dead_letter(JobMessage::parse(d->envelope.payload));
    } catch (Error const& e) {
      if (e.code() != ErrorCode::kInvalidInput) {
        broker_->nack(d->lease, true);
        throw;
      }
      spdlog::warn("unparseable dead letter {} on {} discarded", d->envelope.message_id, queue);
    }
    broker_->ack(d->lease);
    ++handled;
  }
  return handled;
}

std::size_t Gateway::pump(Duration wait) {
  std::size_t handled = 0;
  auto next = broker_->consume_wait(orchestrator::kResultsQueue, consumer_id_, wait);
  while (next) {
    try {
      apply_result(ResultMessage::parse(next->envelope.payload));
    } catch (Error const& e) {
      if (e.code() != ErrorCode::kInvalidInput) {
        broker_->nack(next->lease, true);
        throw;
      }
      spdlog::warn("unparseable result {} discarded: {}", next->envelope.message_id, e.what());
    }
    broker_->ack(next->lease);
    ++handled;
    next = broker_->consume(orchestrator::kResultsQueue, consumer_id_);
  }
  for (auto kind : kKinds) {
    handled += drain_dead(orchestrator::job_queue(kind) + std::string(broker::kDeadSuffix));
  }
  return handled;
}

void Gateway::start_consumer() {
  if (consuming_.exchange(true)) return;
  consumer_ = std::thread([this] {
    while (consuming_) {
      try {
        pump(options_.consume_wait);
      } catch (std::exception const& e) {
        spdlog::error("result consumer: {}", e.what());
        std::this_thread::sleep_for(options_.consume_wait);
      }
    }
  });
}

void Gateway::stop_consumer() {
  consuming_ = false;
  if (consumer_.joinable()) consumer_.join();
}

}  // namespace paddy::gateway
