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

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "paddy/gateway/records.hpp"

namespace paddy::gateway {

/// Storage seam for the gateway. Every call is atomic with respect to the
/// others.
class Repository {
 public:
  virtual ~Repository() = default;

  /// Conflict when the username is taken.
  virtual void insert_user(UserAccount const& user) = 0;
  virtual std::optional<UserAccount> user_by_name(std::string const& username) const = 0;

  virtual void insert_token(TokenRecord const& token) = 0;
  virtual std::optional<TokenRecord> token(std::string const& token_hash) const = 0;

  virtual void insert_upload(UploadRecord const& upload) = 0;
  virtual std::optional<UploadRecord> upload(std::string const& upload_id) const = 0;

  virtual void insert_job(JobRecord const& job) = 0;
  virtual std::optional<JobRecord> job(std::string const& job_id) const = 0;
  /// Runs `mutate` on the stored job under the repository lock and persists
  /// the change when it returns true. NotFound for an unknown id.
  virtual bool update_job(std::string const& job_id,
                          std::function<bool(JobRecord&)> const& mutate) = 0;

  /// Stores the result and marks its job done in one step, together with
  /// any outbreak reports. Returns false, changing nothing, when the job
  /// already has a result or has failed.
  virtual bool complete_job(StoredResult const& result,
                            std::vector<OutbreakReport> const& reports) = 0;
  virtual std::optional<StoredResult> result(std::string const& job_id) const = 0;

  virtual std::vector<OutbreakReport> outbreaks() const = 0;
};

/// In-memory index over an append-only JSON-lines log. An empty path keeps
/// everything in memory.
class FileRepository final : public Repository {
 public:
  explicit FileRepository(std::filesystem::path log_path = {}, bool sync_writes = false);
  ~FileRepository() override;
  FileRepository(FileRepository const&) = delete;
  FileRepository& operator=(FileRepository const&) = delete;

  void insert_user(UserAccount const& user) override;
  std::optional<UserAccount> user_by_name(std::string const& username) const override;
  void insert_token(TokenRecord const& token) override;
  std::optional<TokenRecord> token(std::string const& token_hash) const override;
  void insert_upload(UploadRecord const& upload) override;
  std::optional<UploadRecord> upload(std::string const& upload_id) const override;
  void insert_job(JobRecord const& job) override;
  std::optional<JobRecord> job(std::string const& job_id) const override;
  bool update_job(std::string const& job_id,
                  std::function<bool(JobRecord&)> const& mutate) override;
  bool complete_job(StoredResult const& result,
                    std::vector<OutbreakReport> const& reports) override;
  std::optional<StoredResult> result(std::string const& job_id) const override;
  std::vector<OutbreakReport> outbreaks() const override;

  /// Records replayed from disk at construction.
  std::size_t replayed() const { return replayed_; }

 private:
  void replay();
  void apply(nlohmann::json const& record);
  void append(std::vector<nlohmann::json> const& records);

  std::filesystem::path path_;
  bool sync_ = false;
  std::FILE* log_ = nullptr;
  std::size_t replayed_ = 0;

  mutable std::mutex mu_;
  std::map<std::string, UserAccount> users_;
  std::map<std::string, TokenRecord> tokens_;
  std::map<std::string, UploadRecord> uploads_;
  std::map<std::string, JobRecord> jobs_;
  std::map<std::string, StoredResult> results_;
  std::vector<OutbreakReport> outbreaks_;
};

}  // namespace paddy::gateway
