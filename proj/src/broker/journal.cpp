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

#include "journal.hpp"

#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <unistd.h>

#include <fmt/format.h>

#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"

namespace paddy::broker {
namespace {

constexpr std::size_t kIdBody = 1 + 8;
constexpr std::size_t kEnqueueBody = kIdBody + 8;

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

template <typename T>
T get_le(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

std::string encode(JournalRecord const& r) {
  std::string body;
  body.push_back(static_cast<char>(r.op));
  put_le(body, r.message_id);
  if (r.op == JournalOp::kEnqueue) {
    put_le(body, r.enqueued_at_us);
    body += r.payload;
  }
  std::string out;
  put_le(out, static_cast<std::uint32_t>(body.size()));
  return out + body;
}

[[noreturn]] void io_fail(std::filesystem::path const& path, char const* what) {
  fail(ErrorCode::kIo,
       fmt::format("journal {}: {} failed: {}", path.string(), what, std::strerror(errno)));
}

}  // namespace

Journal::Journal(std::filesystem::path path, bool sync_writes)
    : path_(std::move(path)), sync_(sync_writes) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_fail(path_, "open");
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

void Journal::append(JournalRecord const& record) {
  std::string const bytes = encode(record);
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t const n = ::write(fd_, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail(path_, "write");
    }
    done += static_cast<std::size_t>(n);
  }
  if (sync_ && ::fdatasync(fd_) != 0) io_fail(path_, "fdatasync");
}

JournalContents Journal::read(std::filesystem::path const& path) {
  JournalContents out;
  if (!std::filesystem::exists(path)) return out;
  std::string const data = read_file(path);
  std::size_t at = 0;
  while (at < data.size()) {
    if (data.size() - at < 4) {
      out.torn_tail = true;
      break;
    }
    auto const len = get_le<std::uint32_t>(data, at);
    if (data.size() - at - 4 < len) {
      out.torn_tail = true;
      break;
    }
    std::string_view const body(data.data() + at + 4, len);
    at += 4 + len;
    if (len < kIdBody) {
      fail(ErrorCode::kIo, fmt::format("journal {}: short record", path.string()));
    }
    JournalRecord r;
    auto const op = static_cast<std::uint8_t>(body[0]);
    if (op < 1 || op > 4) {
      fail(ErrorCode::kIo, fmt::format("journal {}: unknown op {}", path.string(), op));
    }
    r.op = static_cast<JournalOp>(op);
    r.message_id = get_le<std::uint64_t>(body, 1);
    if (r.op == JournalOp::kEnqueue) {
      if (len < kEnqueueBody) {
        fail(ErrorCode::kIo, fmt::format("journal {}: short enqueue", path.string()));
      }
      r.enqueued_at_us = get_le<std::int64_t>(body, kIdBody);
      r.payload = std::string(body.substr(kEnqueueBody));
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

void Journal::rewrite(std::filesystem::path const& path,
                      std::vector<JournalRecord> const& records) {
  std::string bytes;
  for (auto const& r : records) bytes += encode(r);
  write_file_atomic(path, bytes);
}

}  // namespace paddy::broker
