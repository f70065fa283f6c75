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

#include "paddy/orchestrator/messages.hpp"

#include <fmt/format.h>

#include "json.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"

namespace paddy::orchestrator {
namespace {

using nlohmann::json;

json parse_object(std::string_view payload, char const* what) {
  json j;
  try {
    j = json::parse(payload);
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("{} is not JSON: {}", what, e.what()));
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidInput, fmt::format("{} must be an object", what));
  return j;
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::kClassification ? "classification" : "detection";
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "classification") return TaskKind::kClassification;
  if (s == "detection") return TaskKind::kDetection;
  fail(ErrorCode::kInvalidInput,
       fmt::format("task kind '{}' is not classification or detection", s));
}

std::string job_queue(TaskKind kind) { return fmt::format("jobs.{}", to_string(kind)); }

std::string JobMessage::serialize() const {
  json j{{"job_id", job_id},
         {"image_digest", image_digest},
         {"task_kind", to_string(task_kind)},
         {"verify", verify}};
  if (conf_threshold) j["conf_threshold"] = *conf_threshold;
  if (nms_iou) j["nms_iou"] = *nms_iou;
  return j.dump();
}

JobMessage JobMessage::parse(std::string_view payload) {
  json const j = parse_object(payload, "job message");
  JobMessage m;
  try {
    m.job_id = j.at("job_id").get<std::string>();
    m.image_digest = j.at("image_digest").get<std::string>();
    m.task_kind = parse_task_kind(j.at("task_kind").get<std::string>());
    m.verify = j.value("verify", false);
    if (j.contains("conf_threshold")) m.conf_threshold = j.at("conf_threshold").get<double>();
    if (j.contains("nms_iou")) m.nms_iou = j.at("nms_iou").get<double>();
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("bad job message: {}", e.what()));
  }
  if (m.job_id.empty()) fail(ErrorCode::kInvalidInput, "job_id must be non-empty");
  if (!is_sha256_hex(m.image_digest)) {
    fail(ErrorCode::kInvalidInput, "image_digest must be a SHA-256 hex digest");
  }
  return m;
}

std::string ResultMessage::serialize() const {
  json j{{"job_id", job_id}, {"backend_id", backend_id}, {"worker_id", worker_id}};
  if (progress) {
    j["status"] = "processing";
    return j.dump();
  }
  json dets = json::array();
  for (auto const& d : detections) dets.push_back(inference::to_json(d));
  j["detections"] = std::move(dets);
  if (classification) j["classification"] = inference::to_json(*classification);
  if (error) j["error"] = *error;
  return j.dump();
}

ResultMessage ResultMessage::parse(std::string_view payload) {
  json const j = parse_object(payload, "result message");
  ResultMessage m;
  try {
    m.job_id = j.at("job_id").get<std::string>();
    m.backend_id = j.value("backend_id", std::string{});
    m.worker_id = j.value("worker_id", std::string{});
    if (j.contains("status")) {
      if (j.at("status") != "processing") {
        fail(ErrorCode::kInvalidInput, "result status must be processing when present");
      }
      m.progress = true;
      return m;
    }
    for (auto const& d : j.at("detections")) m.detections.push_back(inference::detection_from_json(d));
    if (j.contains("classification") && !j.at("classification").is_null()) {
      m.classification = inference::classification_from_json(j.at("classification"));
    }
    if (j.contains("error") && !j.at("error").is_null()) m.error = j.at("error").get<std::string>();
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("bad result message: {}", e.what()));
  }
  if (m.job_id.empty()) fail(ErrorCode::kInvalidInput, "job_id must be non-empty");
  return m;
}

}  // namespace paddy::orchestrator
