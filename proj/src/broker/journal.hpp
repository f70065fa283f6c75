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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace paddy::broker {

enum class JournalOp : std::uint8_t { kEnqueue = 1, kAck = 2, kDead = 3, kDeliver = 4 };

/// On disk: u32 little-endian body length, then the body
/// {u8 op, u64 message_id, [i64 enqueued_at_us, payload bytes]}; the
/// bracketed part is present for enqueue records only.
struct JournalRecord {
  JournalOp op = JournalOp::kEnqueue;
  std::uint64_t message_id = 0;
  std::int64_t enqueued_at_us = 0;
  std::string payload;
};

struct JournalContents {
  std::vector<JournalRecord> records;
  /// A partial record at the end was discarded.
  bool torn_tail = false;
};

class Journal {
 public:
  Journal(std::filesystem::path path, bool sync_writes);
  ~Journal();
  Journal(Journal const&) = delete;
  Journal& operator=(Journal const&) = delete;

  void append(JournalRecord const& record);

  static JournalContents read(std::filesystem::path const& path);
  /// Atomically replaces the file with exactly `records`.
  static void rewrite(std::filesystem::path const& path,
                      std::vector<JournalRecord> const& records);

 private:
  std::filesystem::path path_;
  bool sync_;
  int fd_ = -1;
};

}  // namespace paddy::broker
