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

#include "paddy/core/blob_store.hpp"

#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"

namespace paddy {

namespace fs = std::filesystem;

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
}

fs::path BlobStore::path_for(std::string_view digest) const {
  if (!is_sha256_hex(digest)) {
    fail(ErrorCode::kInvalidInput, "malformed digest: " + std::string(digest));
  }
  return root_ / std::string(digest.substr(0, 2)) / std::string(digest);
}

std::string BlobStore::put(std::string_view bytes) {
  auto digest = sha256_hex(bytes);
  auto const path = path_for(digest);
  // Identical content already stored; renames make partial blobs invisible.
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return digest;
}

std::string BlobStore::get(std::string_view digest) const {
  auto const path = path_for(digest);
  if (!fs::exists(path)) {
    fail(ErrorCode::kNotFound, "no blob " + std::string(digest));
  }
  return read_file(path);
}

bool BlobStore::contains(std::string_view digest) const {
  return is_sha256_hex(digest) && fs::exists(path_for(digest));
}

std::size_t BlobStore::blob_count() const {
  std::size_t n = 0;
  for (auto const& entry : fs::recursive_directory_iterator(root_)) {
    if (entry.is_regular_file() &&
        is_sha256_hex(entry.path().filename().string())) {
      ++n;
    }
  }
  return n;
}

}  // namespace paddy
