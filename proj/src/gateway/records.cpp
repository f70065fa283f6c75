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

#include "paddy/gateway/records.hpp"

#include <set>

#include "paddy/core/error.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::gateway {

using nlohmann::json;

namespace {

std::int64_t micros(TimePoint t) { return to_unix_micros(t); }
TimePoint time_at(json const& j, char const* key) {
  return from_unix_micros(j.at(key).get<std::int64_t>());
}

template <typename T>
void put_optional(json& j, char const* key, std::optional<T> const& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(json const& j, char const* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kProcessing: return "processing";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "queued";
}

JobStatus parse_job_status(std::string_view s) {
  for (auto v : {JobStatus::kQueued, JobStatus::kProcessing, JobStatus::kDone,
                 JobStatus::kFailed}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorCode::kInvalidInput, "unknown job status '" + std::string(s) + "'");
}

int status_rank(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return 0;
    case JobStatus::kProcessing: return 1;
    case JobStatus::kDone:
    case JobStatus::kFailed: return 2;
  }
  return 0;
}

bool is_terminal(JobStatus s) { return status_rank(s) == 2; }

std::vector<int> StoredResult::classes_present() const {
  std::set<int> classes;
  if (classification) classes.insert(classification->top_class);
  for (auto const& d : detections) classes.insert(detection_to_class_index(d.class_index));
  return {classes.begin(), classes.end()};
}

void to_json(json& j, UserAccount const& v) {
  j = json{{"user_id", v.user_id},
           {"username", v.username},
           {"credential_hash", v.credential_hash},
           {"created_at", micros(v.created_at)}};
}

void from_json(json const& j, UserAccount& v) {
  v.user_id = j.at("user_id").get<std::string>();
  v.username = j.at("username").get<std::string>();
  v.credential_hash = j.at("credential_hash").get<std::string>();
  v.created_at = time_at(j, "created_at");
}

void to_json(json& j, TokenRecord const& v) {
  j = json{{"token_hash", v.token_hash},
           {"user_id", v.user_id},
           {"expires_at", micros(v.expires_at)}};
}

void from_json(json const& j, TokenRecord& v) {
  v.token_hash = j.at("token_hash").get<std::string>();
  v.user_id = j.at("user_id").get<std::string>();
  v.expires_at = time_at(j, "expires_at");
}

void to_json(json& j, UploadRecord const& v) {
  j = json{{"upload_id", v.upload_id},
           {"owner", v.owner},
           {"image_digest", v.image_digest},
           {"stored_path", v.stored_path},
           {"created_at", micros(v.created_at)}};
  if (v.geo) j["geo"] = {v.geo->latitude, v.geo->longitude};
}

void from_json(json const& j, UploadRecord& v) {
  v.upload_id = j.at("upload_id").get<std::string>();
  v.owner = j.at("owner").get<std::string>();
  v.image_digest = j.at("image_digest").get<std::string>();
  v.stored_path = j.at("stored_path").get<std::string>();
  v.created_at = time_at(j, "created_at");
  v.geo.reset();
  if (auto it = j.find("geo"); it != j.end() && !it->is_null()) {
    v.geo = GeoPoint{it->at(0).get<double>(), it->at(1).get<double>()};
  }
}

void to_json(json& j, JobRecord const& v) {
  j = json{{"job_id", v.job_id},
           {"owner", v.owner},
           {"upload_id", v.upload_id},
           {"task_kind", orchestrator::to_string(v.task_kind)},
           {"verify", v.verify},
           {"status", to_string(v.status)},
           {"created_at", micros(v.created_at)},
           {"updated_at", micros(v.updated_at)}};
  put_optional(j, "conf_threshold", v.conf_threshold);
  put_optional(j, "nms_iou", v.nms_iou);
  put_optional(j, "result_ref", v.result_ref);
  put_optional(j, "error", v.error);
}

void from_json(json const& j, JobRecord& v) {
  v.job_id = j.at("job_id").get<std::string>();
  v.owner = j.at("owner").get<std::string>();
  v.upload_id = j.at("upload_id").get<std::string>();
  v.task_kind = orchestrator::parse_task_kind(j.at("task_kind").get<std::string>());
  v.verify = j.at("verify").get<bool>();
  v.status = parse_job_status(j.at("status").get<std::string>());
  v.created_at = time_at(j, "created_at");
  v.updated_at = time_at(j, "updated_at");
  v.conf_threshold = get_optional<double>(j, "conf_threshold");
  v.nms_iou = get_optional<double>(j, "nms_iou");
  v.result_ref = get_optional<std::string>(j, "result_ref");
  v.error = get_optional<std::string>(j, "error");
}

void to_json(json& j, StoredResult const& v) {
  json dets = json::array();
  for (auto const& d : v.detections) dets.push_back(inference::to_json(d));
  j = json{{"job_id", v.job_id},
           {"backend_id", v.backend_id},
           {"worker_id", v.worker_id},
           {"detections", std::move(dets)},
           {"completed_at", micros(v.completed_at)}};
  if (v.classification) j["classification"] = inference::to_json(*v.classification);
}

void from_json(json const& j, StoredResult& v) {
  v.job_id = j.at("job_id").get<std::string>();
  v.backend_id = j.at("backend_id").get<std::string>();
  v.worker_id = j.at("worker_id").get<std::string>();
  v.detections.clear();
  for (auto const& d : j.at("detections")) v.detections.push_back(inference::detection_from_json(d));
  v.classification.reset();
  if (auto it = j.find("classification"); it != j.end() && !it->is_null()) {
    v.classification = inference::classification_from_json(*it);
  }
  v.completed_at = time_at(j, "completed_at");
}

void to_json(json& j, OutbreakReport const& v) {
  j = json{{"report_id", v.report_id},
           {"job_id", v.job_id},
           {"class", index_to_slug(v.class_index)},
           {"geo", {v.geo.latitude, v.geo.longitude}},
           {"observed_at", micros(v.observed_at)}};
}

void from_json(json const& j, OutbreakReport& v) {
  v.report_id = j.at("report_id").get<std::string>();
  v.job_id = j.at("job_id").get<std::string>();
  v.class_index = class_index(j.at("class").get<std::string>());
  v.geo = GeoPoint{j.at("geo").at(0).get<double>(), j.at("geo").at(1).get<double>()};
  v.observed_at = time_at(j, "observed_at");
}

}  // namespace paddy::gateway
