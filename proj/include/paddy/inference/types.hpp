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
#include "paddy/core/geometry.hpp"
#include "paddy/core/raster.hpp"

namespace paddy::inference {

struct BackendInfo {
  std::string backend_id;
  std::string version;
  bool can_classify = false;
  bool can_detect = false;
  /// Square side the classifier expects its input resized to.
  int input_side = 384;
};

struct ClassificationResult {
  /// One probability per classification class, in taxonomy order.
  std::vector<double> probs;
  int top_class = 0;
  double top_prob = 0;

  /// Validates the vector (13 entries in [0,1] summing to 1 ± 1e-6) and
  /// fills in the arg-max. Throws InvalidInput.
  static ClassificationResult from_probs(std::vector<double> probs);

  friend bool operator==(ClassificationResult const&,
                         ClassificationResult const&) = default;
};

enum class DetectionStatus { kRaw, kKept, kVerified, kContested };

std::string_view to_string(DetectionStatus s);
DetectionStatus parse_detection_status(std::string_view s);

struct Detection {
  /// Index into the 12 detection classes.
  int class_index = 0;
  double confidence = 0;
  NormalizedBox box;
  DetectionStatus status = DetectionStatus::kRaw;

  /// Throws InvalidInput on a bad class, confidence or box.
  void validate() const;

  friend bool operator==(Detection const&, Detection const&) = default;
};

/// An image handed to a backend. `digest` keys fixture lookups; derived
/// rasters such as verification crops carry the digest of their source in
/// `parent_digest`.
struct ImageInput {
  RasterImage raster;
  std::string digest;
  std::optional<std::string> parent_digest;

  /// Decodes encoded bytes; the digest is the SHA-256 of the bytes.
  static ImageInput from_bytes(std::string_view bytes);
  /// The digest is that of the raster's pixel content.
  static ImageInput from_raster(RasterImage raster,
                                std::optional<std::string> parent = std::nullopt);
};

nlohmann::json to_json(ClassificationResult const& r);
ClassificationResult classification_from_json(nlohmann::json const& j);
/// {"class": slug, "confidence": c, "box": [cx, cy, w, h], "status": s}
nlohmann::json to_json(Detection const& d);
Detection detection_from_json(nlohmann::json const& j);

}  // namespace paddy::inference
