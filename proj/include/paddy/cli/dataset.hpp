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

#include "json.hpp"
#include "paddy/augment/transform.hpp"

namespace paddy::cli {

struct ClassCount {
  std::string name;
  std::size_t images = 0;
};

struct DatasetStats {
  /// Recognized class directories in taxonomy order.
  std::vector<ClassCount> classes;
  /// Directories whose name is not a class slug, by name.
  std::vector<ClassCount> unrecognized;
  std::size_t total = 0;
};

/// Counts JPEG/PNG files in each immediate subdirectory named after a
/// class. `total` covers recognized classes only.
DatasetStats dataset_stats(std::filesystem::path const& dataset_dir);
std::string render_text(DatasetStats const& stats);
nlohmann::json to_json(DatasetStats const& stats);

struct SplitSummary {
  std::size_t train = 0;
  std::size_t test = 0;
  std::filesystem::path written;
};

/// Assigns every row of the manifest to train or test and writes the
/// result to `out` (the input manifest when empty). Refused when the
/// manifest already holds augmented rows.
SplitSummary split_manifest(std::filesystem::path const& manifest, double ratio,
                            std::uint64_t seed, std::filesystem::path const& out = {});

struct AugmentSummary {
  std::size_t train_sources = 0;
  std::size_t generated = 0;
  std::size_t boxes_kept = 0;
  std::size_t boxes_dropped = 0;
  std::filesystem::path manifest;
};

/// Reads ranges and probabilities over the defaults; the seed is not part
/// of the file.
augment::AugmentConfig parse_augment_config(nlohmann::json const& doc);

/// Writes `multiplier` augmented variants of every train item under
/// `out_dir`, together with a manifest listing the original and derived
/// rows. Test rows are never read. Refused unless the manifest is split.
AugmentSummary augment_manifest(std::filesystem::path const& manifest,
                                augment::AugmentConfig const& config, int multiplier,
                                std::filesystem::path const& out_dir);

}  // namespace paddy::cli
