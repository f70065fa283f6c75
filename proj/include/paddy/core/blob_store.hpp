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

#include <filesystem>
#include <string>
#include <string_view>

namespace paddy {

/// Content-addressed blob storage keyed by lowercase hex SHA-256. Blobs are
/// laid out as <root>/<first two hex digits>/<digest>.
class BlobStore {
 public:
  explicit BlobStore(std::filesystem::path root);

  /// Stores `bytes` unless an identical blob exists; returns the digest.
  std::string put(std::string_view bytes);
  /// Throws NotFound when absent, InvalidInput for a malformed digest.
  std::string get(std::string_view digest) const;
  bool contains(std::string_view digest) const;
  std::filesystem::path path_for(std::string_view digest) const;
  std::size_t blob_count() const;

  std::filesystem::path const& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace paddy
