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

#include "paddy/inference/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::inference {

using nlohmann::json;

ClassificationResult ClassificationResult::from_probs(std::vector<double> probs) {
  if (probs.size() != static_cast<std::size_t>(kNumClasses)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("expected {} probabilities, got {}", kNumClasses, probs.size()));
  }
  double sum = 0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0 || p > 1) {
      fail(ErrorCode::kInvalidInput, fmt::format("probability {} outside [0, 1]", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1) > 1e-6) {
    fail(ErrorCode::kInvalidInput, fmt::format("probabilities sum to {}", sum));
  }
  ClassificationResult r;
  r.probs = std::move(probs);
  for (std::size_t i = 1; i < r.probs.size(); ++i) {
    if (r.probs[i] > r.probs[static_cast<std::size_t>(r.top_class)]) {
      r.top_class = static_cast<int>(i);
    }
  }
  r.top_prob = r.probs[static_cast<std::size_t>(r.top_class)];
  return r;
}

std::string_view to_string(DetectionStatus s) {
  switch (s) {
    case DetectionStatus::kRaw: return "raw";
    case DetectionStatus::kKept: return "kept";
    case DetectionStatus::kVerified: return "verified";
    case DetectionStatus::kContested: return "contested";
  }
  return "raw";
}

DetectionStatus parse_detection_status(std::string_view s) {
  for (auto st : {DetectionStatus::kRaw, DetectionStatus::kKept,
                  DetectionStatus::kVerified, DetectionStatus::kContested}) {
    if (to_string(st) == s) return st;
  }
  fail(ErrorCode::kInvalidInput, fmt::format("unknown detection status '{}'", s));
}

void Detection::validate() const {
  if (class_index < 0 || class_index >= kNumDetectionClasses) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("detection class {} out of range", class_index));
  }
  if (!(confidence >= 0 && confidence <= 1)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("confidence {} outside [0, 1]", confidence));
  }
  require_valid(box);
}

ImageInput ImageInput::from_bytes(std::string_view bytes) {
  ImageInput in;
  in.raster = decode_image(bytes);
  in.digest = sha256_hex(bytes);
  return in;
}

ImageInput ImageInput::from_raster(RasterImage raster,
                                   std::optional<std::string> parent) {
  ImageInput in;
  in.digest = raster_digest(raster);
  in.raster = std::move(raster);
  in.parent_digest = std::move(parent);
  return in;
}

json to_json(ClassificationResult const& r) {
  return {{"probs", r.probs},
          {"top_class", index_to_slug(r.top_class)},
          {"top_prob", r.top_prob}};
}

ClassificationResult classification_from_json(json const& j) {
  try {
    return ClassificationResult::from_probs(j.at("probs").get<std::vector<double>>());
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("bad classification: {}", e.what()));
  }
}

json to_json(Detection const& d) {
  return {{"class", detection_slug(d.class_index)},
          {"confidence", d.confidence},
          {"box", {d.box.cx, d.box.cy, d.box.w, d.box.h}},
          {"status", to_string(d.status)}};
}

Detection detection_from_json(json const& j) {
  Detection d;
  try {
    d.class_index = detection_index(j.at("class").get<std::string>());
    d.confidence = j.contains("confidence") ? j.at("confidence").get<double>()
                                            : j.at("conf").get<double>();
    auto const box = j.at("box").get<std::vector<double>>();
    if (box.size() != 4) fail(ErrorCode::kInvalidInput, "box needs 4 numbers");
    d.box = {box[0], box[1], box[2], box[3]};
    if (j.contains("status")) {
      d.status = parse_detection_status(j.at("status").get<std::string>());
    }
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("bad detection: {}", e.what()));
  } catch (Error const& e) {
    fail(ErrorCode::kInvalidInput, e.what());
  }
  d.validate();
  return d;
}

}  // namespace paddy::inference
