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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paddy/inference/types.hpp"

namespace paddy::orchestrator {

enum class TaskKind { kClassification, kDetection };

std::string_view to_string(TaskKind kind);
/// Throws InvalidInput.
TaskKind parse_task_kind(std::string_view s);

/// "jobs.classification" or "jobs.detection".
std::string job_queue(TaskKind kind);
inline constexpr char const* kResultsQueue = "results";

/// {job_id, image_digest, task_kind, verify, conf_threshold?, nms_iou?}
struct JobMessage {
  std::string job_id;
  std::string image_digest;
  TaskKind task_kind = TaskKind::kClassification;
  bool verify = false;
  std::optional<double> conf_threshold;
  std::optional<double> nms_iou;

  std::string serialize() const;
  /// Throws InvalidInput on malformed JSON or fields.
  static JobMessage parse(std::string_view payload);

  friend bool operator==(JobMessage const&, JobMessage const&) = default;
};

/// Final results carry {job_id, backend_id, detections[], classification?,
/// error?}. A worker that picks up a job first sends a progress notice
/// {job_id, status: "processing", worker_id, backend_id}.
struct ResultMessage {
  std::string job_id;
  std::string backend_id;
  std::string worker_id;
  bool progress = false;
  std::vector<inference::Detection> detections;
  std::optional<inference::ClassificationResult> classification;
  std::optional<std::string> error;

  std::string serialize() const;
  static ResultMessage parse(std::string_view payload);

  friend bool operator==(ResultMessage const&, ResultMessage const&) = default;
};

}  // namespace paddy::orchestrator
