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

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "paddy/broker/broker.hpp"
#include "paddy/core/blob_store.hpp"
#include "paddy/core/clock.hpp"
#include "paddy/core/treatment.hpp"
#include "paddy/gateway/credentials.hpp"
#include "paddy/gateway/repository.hpp"

namespace paddy::gateway {

inline constexpr std::size_t kMaxUploadBytes = 10 * 1024 * 1024;

struct GatewayOptions {
  Duration token_ttl = std::chrono::hours(24);
  int pbkdf2_iterations = kDefaultPbkdf2Iterations;
  std::size_t max_upload_bytes = kMaxUploadBytes;
  bool durable_queues = false;
  /// Per-call wait of the result consumer.
  Duration consume_wait = std::chrono::milliseconds(200);
};

struct JobRequest {
  std::string upload_id;
  orchestrator::TaskKind task_kind = orchestrator::TaskKind::kDetection;
  bool verify = false;
  std::optional<double> conf_threshold;
  std::optional<double> nms_iou;
};

struct TreatmentView {
  std::string slug;
  TreatmentEntry entry;
};

struct DiagnosisResult {
  std::string job_id;
  std::string backend_id;
  std::vector<inference::Detection> detections;
  std::optional<inference::ClassificationResult> classification;
  /// One per distinct class in the result, ascending by class index.
  std::vector<TreatmentView> treatments;
};

struct OutbreakGroup {
  int class_index = 0;
  std::size_t count = 0;
  GeoPoint centroid;
};

nlohmann::json to_json(TreatmentView const& t);
nlohmann::json to_json(DiagnosisResult const& r);
nlohmann::json to_json(OutbreakGroup const& g);
/// Public view of a job; the owner is omitted.
nlohmann::json job_view(JobRecord const& job);

/// Application core behind the HTTP routes. Callers pass an authenticated
/// user id obtained from `authenticate`.
class Gateway {
 public:
  Gateway(std::shared_ptr<Repository> repo, std::shared_ptr<BlobStore> blobs,
          std::shared_ptr<broker::MessageBroker> broker, TreatmentKb treatments,
          GatewayOptions options = {}, std::shared_ptr<Clock> clock = system_clock());
  ~Gateway();
  Gateway(Gateway const&) = delete;
  Gateway& operator=(Gateway const&) = delete;

  /// InvalidInput for a malformed username or short password, Conflict for
  /// a taken name.
  std::string register_user(std::string const& username, std::string const& password);
  /// Unauthorized, with one message for every kind of mismatch.
  std::string login(std::string const& username, std::string const& password);
  /// Resolves a bearer token to its user id, or throws Unauthorized.
  std::string authenticate(std::string_view token) const;

  /// PayloadTooLarge above the size limit, UnsupportedMedia unless the
  /// bytes decode as JPEG or PNG, InvalidInput for an out-of-range point.
  UploadRecord upload_image(std::string const& user_id, std::string_view bytes,
                            std::optional<GeoPoint> geo = std::nullopt);
  /// Persists the job as queued, then publishes it. NotFound for an unknown
  /// upload, Forbidden for someone else's. Unavailable if the broker
  /// rejects the message; the job is then marked failed.
  JobRecord create_job(std::string const& user_id, JobRequest const& request);
  JobRecord job_status(std::string const& user_id, std::string const& job_id) const;
  /// Conflict, naming the status, until the job is done.
  DiagnosisResult get_result(std::string const& user_id, std::string const& job_id) const;
  /// InvalidInput for an inverted or out-of-range rectangle.
  std::vector<OutbreakGroup> list_outbreaks(GeoRect const& bbox, TimePoint since) const;
  TreatmentView treatment(std::string_view slug) const;

  /// Applies one message from the results queue. Returns true when the job
  /// changed; replays and stale progress notices change nothing.
  bool apply_result(orchestrator::ResultMessage const& message);
  /// Marks a job whose message was dead-lettered as failed.
  bool apply_dead_letter(orchestrator::JobMessage const& message);
  /// Drains what is currently available on the results and dead-letter
  /// queues, waiting up to `wait` for the first result. Returns the number
  /// of messages handled.
  std::size_t pump(Duration wait);

  /// Runs `pump` on a background thread until `stop_consumer`.
  void start_consumer();
  void stop_consumer();

  Repository& repository() { return *repo_; }
  BlobStore& blobs() { return *blobs_; }

 private:
  JobRecord owned_job(std::string const& user_id, std::string const& job_id) const;
  std::size_t drain_dead(std::string const& queue);

  std::shared_ptr<Repository> repo_;
  std::shared_ptr<BlobStore> blobs_;
  std::shared_ptr<broker::MessageBroker> broker_;
  TreatmentKb treatments_;
  GatewayOptions options_;
  std::shared_ptr<Clock> clock_;
  std::string dummy_hash_;
  std::string consumer_id_;

  std::atomic<bool> consuming_{false};
  std::thread consumer_;
};

}  // namespace paddy::gateway
