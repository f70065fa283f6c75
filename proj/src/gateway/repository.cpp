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

#include "paddy/gateway/repository.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::gateway {

using nlohmann::json;

namespace {

json record(char const* kind, json value) {
  return json{{"k", kind}, {"v", std::move(value)}};
}

}  // namespace

FileRepository::FileRepository(std::filesystem::path log_path, bool sync_writes)
    : path_(std::move(log_path)), sync_(sync_writes) {
  if (path_.empty()) return;
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  replay();
  log_ = std::fopen(path_.c_str(), "ab");
  if (log_ == nullptr) fail(ErrorCode::kIo, fmt::format("cannot open {}", path_.string()));
}

FileRepository::~FileRepository() {
  if (log_ != nullptr) std::fclose(log_);
}

void FileRepository::replay() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string const text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    ++line_no;
    auto const nl = text.find('\n', pos);
    bool const tail = nl == std::string::npos;
    std::string_view const line(text.data() + pos, (tail ? text.size() : nl) - pos);
    try {
      apply(json::parse(line));
      ++replayed_;
    } catch (std::exception const& e) {
      if (!tail) {
        fail(ErrorCode::kIo, fmt::format("{}:{}: corrupt record: {}", path_.string(), line_no, e.what()));
      }
      std::filesystem::resize_file(path_, pos);
      return;
    }
    if (tail) {
      std::ofstream(path_, std::ios::binary | std::ios::app) << '\n';
      return;
    }
    pos = nl + 1;
  }
}

void FileRepository::apply(json const& r) {
  auto const& kind = r.at("k").get_ref<std::string const&>();
  auto const& v = r.at("v");
  if (kind == "user") {
    auto u = v.get<UserAccount>();
    users_[u.username] = std::move(u);
  } else if (kind == "token") {
    auto t = v.get<TokenRecord>();
    tokens_[t.token_hash] = std::move(t);
  } else if (kind == "upload") {
    auto u = v.get<UploadRecord>();
    uploads_[u.upload_id] = std::move(u);
  } else if (kind == "job") {
    auto jb = v.get<JobRecord>();
    jobs_[jb.job_id] = std::move(jb);
  } else if (kind == "complete") {
    auto res = v.at("result").get<StoredResult>();
    auto jb = v.at("job").get<JobRecord>();
    for (auto const& o : v.at("outbreaks")) outbreaks_.push_back(o.get<OutbreakReport>());
    results_[res.job_id] = std::move(res);
    jobs_[jb.job_id] = std::move(jb);
  } else {
    fail(ErrorCode::kIo, "unknown record kind '" + kind + "'");
  }
}

void FileRepository::append(std::vector<json> const& records) {
  if (log_ == nullptr) return;
  std::string text;
  for (auto const& r : records) {
    text += r.dump();
    text += '\n';
  }
  if (std::fwrite(text.data(), 1, text.size(), log_) != text.size() || std::fflush(log_) != 0) {
    fail(ErrorCode::kIo, fmt::format("write to {} failed", path_.string()));
  }
  if (sync_ && ::fdatasync(::fileno(log_)) != 0) {
    fail(ErrorCode::kIo, fmt::format("sync of {} failed", path_.string()));
  }
}

void FileRepository::insert_user(UserAccount const& user) {
  std::lock_guard lock(mu_);
  if (users_.contains(user.username)) {
    fail(ErrorCode::kConflict, "username already registered");
  }
  append({record("user", user)});
  users_[user.username] = user;
}

std::optional<UserAccount> FileRepository::user_by_name(std::string const& username) const {
  std::lock_guard lock(mu_);
  auto it = users_.find(username);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

void FileRepository::insert_token(TokenRecord const& token) {
  std::lock_guard lock(mu_);
  append({record("token", token)});
  tokens_[token.token_hash] = token;
}

std::optional<TokenRecord> FileRepository::token(std::string const& token_hash) const {
  std::lock_guard lock(mu_);
  auto it = tokens_.find(token_hash);
  if (it == tokens_.end()) return std::nullopt;
  return it->second;
}

void FileRepository::insert_upload(UploadRecord const& upload) {
  std::lock_guard lock(mu_);
  if (uploads_.contains(upload.upload_id)) fail(ErrorCode::kConflict, "duplicate upload id");
  append({record("upload", upload)});
  uploads_[upload.upload_id] = upload;
}

std::optional<UploadRecord> FileRepository::upload(std::string const& upload_id) const {
  std::lock_guard lock(mu_);
  auto it = uploads_.find(upload_id);
  if (it == uploads_.end()) return std::nullopt;
  return it->second;
}

void FileRepository::insert_job(JobRecord const& job) {
  std::lock_guard lock(mu_);
  if (jobs_.contains(job.job_id)) fail(ErrorCode::kConflict, "duplicate job id");
  append({record("job", job)});
  jobs_[job.job_id] = job;
}

std::optional<JobRecord> FileRepository::job(std::string const& job_id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

bool FileRepository::update_job(std::string const& job_id,
                                std::function<bool(JobRecord&)> const& mutate) {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) fail(ErrorCode::kNotFound, "no such job");
  JobRecord next = it->second;
  if (!mutate(next)) return false;
  append({record("job", next)});
  it->second = std::move(next);
  return true;
}

bool FileRepository::complete_job(StoredResult const& result,
                                  std::vector<OutbreakReport> const& reports) {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(result.job_id);
  if (it == jobs_.end()) fail(ErrorCode::kNotFound, "no such job");
  if (is_terminal(it->second.status) || results_.contains(result.job_id)) return false;
  JobRecord next = it->second;
  next.status = JobStatus::kDone;
  next.result_ref = result.job_id;
  next.error.reset();
  next.updated_at = result.completed_at;
  append({record("complete", json{{"result", result}, {"job", next}, {"outbreaks", reports}})});
  results_[result.job_id] = result;
  it->second = std::move(next);
  outbreaks_.insert(outbreaks_.end(), reports.begin(), reports.end());
  return true;
}

std::optional<StoredResult> FileRepository::result(std::string const& job_id) const {
  std::lock_guard lock(mu_);
  auto it = results_.find(job_id);
  if (it == results_.end()) return std::nullopt;
  return it->second;
}

std::vector<OutbreakReport> FileRepository::outbreaks() const {
  std::lock_guard lock(mu_);
  return outbreaks_;
}

}  // namespace paddy::gateway
