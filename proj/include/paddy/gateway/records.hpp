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

#include "json.hpp"
#include "paddy/core/clock.hpp"
#include "paddy/core/geometry.hpp"
#include "paddy/inference/types.hpp"
#include "paddy/orchestrator/messages.hpp"

namespace paddy::gateway {

struct UserAccount {
  std::string user_id;
  std::string username;
  /// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
  std::string credential_hash;
  TimePoint created_at;

  friend bool operator==(UserAccount const&, UserAccount const&) = default;
};

/// Issued bearer token, stored under the SHA-256 of its value.
struct TokenRecord {
  std::string token_hash;
  std::string user_id;
  TimePoint expires_at;

  friend bool operator==(TokenRecord const&, TokenRecord const&) = default;
};

struct UploadRecord {
  std::string upload_id;
  std::string owner;
  std::string image_digest;
  std::string stored_path;
  std::optional<GeoPoint> geo;
  TimePoint created_at;

  friend bool operator==(UploadRecord const&, UploadRecord const&) = default;
};

enum class JobStatus { kQueued, kProcessing, kDone, kFailed };

std::string_view to_string(JobStatus s);
JobStatus parse_job_status(std::string_view s);
/// Position along queued → processing → {done, failed}.
int status_rank(JobStatus s);
bool is_terminal(JobStatus s);

struct JobRecord {
  std::string job_id;
  std::string owner;
  std::string upload_id;
  orchestrator::TaskKind task_kind = orchestrator::TaskKind::kClassification;
  bool verify = false;
  std::optional<double> conf_threshold;
  std::optional<double> nms_iou;
  JobStatus status = JobStatus::kQueued;
  /// Key of the stored result; present exactly when done.
  std::optional<std::string> result_ref;
  std::optional<std::string> error;
  TimePoint created_at;
  TimePoint updated_at;

  friend bool operator==(JobRecord const&, JobRecord const&) = default;
};

struct StoredResult {
  std::string job_id;
  std::string backend_id;
  std::string worker_id;
  std::vector<inference::Detection> detections;
  std::optional<inference::ClassificationResult> classification;
  TimePoint completed_at;

  /// Taxonomy indices present: the classification's top class and every
  /// detection class, ascending and without repeats.
  std::vector<int> classes_present() const;

  friend bool operator==(StoredResult const&, StoredResult const&) = default;
};

struct OutbreakReport {
  std::string report_id;
  std::string job_id;
  int class_index = 0;
  GeoPoint geo;
  TimePoint observed_at;

  friend bool operator==(OutbreakReport const&, OutbreakReport const&) = default;
};

void to_json(nlohmann::json& j, UserAccount const& v);
void from_json(nlohmann::json const& j, UserAccount& v);
void to_json(nlohmann::json& j, TokenRecord const& v);
void from_json(nlohmann::json const& j, TokenRecord& v);
void to_json(nlohmann::json& j, UploadRecord const& v);
void from_json(nlohmann::json const& j, UploadRecord& v);
void to_json(nlohmann::json& j, JobRecord const& v);
void from_json(nlohmann::json const& j, JobRecord& v);
void to_json(nlohmann::json& j, StoredResult const& v);
void from_json(nlohmann::json const& j, StoredResult& v);
void to_json(nlohmann::json& j, OutbreakReport const& v);
void from_json(nlohmann::json const& j, OutbreakReport& v);

}  // namespace paddy::gateway
