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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paddy::augment {

struct ManifestRow {
  std::string id;
  /// Relative to the manifest's directory unless absolute.
  std::string path;
  /// "train", "test" or empty when not yet split.
  std::string split;
  /// Classification label; empty for detection datasets.
  std::string class_slug;
  /// Id of the item an augmented row was derived from.
  std::string source_id;

  friend bool operator==(ManifestRow const&, ManifestRow const&) = default;
};

/// CSV with header `id,path,split` and optional `class_slug` and
/// `source_id` columns, in any order. Fields may not contain commas,
/// quotes or newlines.
struct DatasetManifest {
  std::vector<ManifestRow> rows;

  static DatasetManifest parse(std::string_view csv,
                               std::string_view source = "<manifest>");
  static DatasetManifest load(std::filesystem::path const& path);
  std::string to_csv() const;
  void save(std::filesystem::path const& path) const;

  bool is_split() const;
  std::optional<ManifestRow> find(std::string_view id) const;
  std::vector<std::string> ids() const;

  friend bool operator==(DatasetManifest const&, DatasetManifest const&) = default;
};

}  // namespace paddy::augment
