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

#include "paddy/inference/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "paddy/augment/preprocess.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/taxonomy.hpp"
#include "paddy/metrics/detection.hpp"

namespace paddy::inference {
namespace {

void require_open_unit(double v, char const* name) {
  if (!(v > 0 && v < 1)) {
    fail(ErrorCode::kInvalidInput, fmt::format("{} {} outside (0, 1)", name, v));
  }
}

}  // namespace

void DetectOptions::validate() const {
  require_open_unit(conf_threshold, "conf_threshold");
  require_open_unit(nms_iou, "nms_iou");
}

void VerifyOptions::validate() const {
  if (!(crop_margin >= 0 && crop_margin <= 1)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("crop_margin {} outside [0, 1]", crop_margin));
  }
  if (!(agree_prob >= 0 && agree_prob <= 1)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("agree_prob {} outside [0, 1]", agree_prob));
  }
}

ClassificationResult classify(ModelBackend& backend, ImageInput const& image) {
  if (!backend.info().can_classify) {
    fail(ErrorCode::kUnsupported,
         fmt::format("backend '{}' cannot classify", backend.info().backend_id));
  }
  return backend.classify(image);
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  require_open_unit(iou_threshold, "iou_threshold");
  std::stable_sort(dets.begin(), dets.end(), [](auto const& a, auto const& b) {
    return a.confidence > b.confidence;
  });
  std::vector<Detection> kept;
  std::vector<bool> suppressed(dets.size(), false);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (suppressed[i]) continue;
    Detection d = dets[i];
    d.status = DetectionStatus::kKept;
    kept.push_back(d);
    CornerBox const ci = dets[i].box.corners();
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      if (suppressed[j] || dets[j].class_index != dets[i].class_index) continue;
      if (metrics::iou(ci, dets[j].box.corners()) >= iou_threshold) suppressed[j] = true;
    }
  }
  return kept;
}

std::vector<Detection> detect(ModelBackend& backend, ImageInput const& image,
                              DetectOptions const& options) {
  options.validate();
  if (!backend.info().can_detect) {
    fail(ErrorCode::kUnsupported,
         fmt::format("backend '{}' cannot detect", backend.info().backend_id));
  }
  auto raw = backend.detect_raw(image);
  std::erase_if(raw, [&](Detection const& d) {
    return d.confidence < options.conf_threshold;
  });
  return nms(std::move(raw), options.nms_iou);
}

ImageInput verification_crop(ImageInput const& image, Detection const& det,
                             double crop_margin, int side) {
  auto const& img = image.raster;
  if (img.empty()) fail(ErrorCode::kInvalidInput, "empty image");
  double const W = img.width(), H = img.height();
  double const mx = det.box.w * crop_margin, my = det.box.h * crop_margin;
  CornerBox const c = det.box.corners();
  int const x1 = std::clamp(static_cast<int>(std::floor((c.x1 - mx) * W)), 0, img.width() - 1);
  int const y1 = std::clamp(static_cast<int>(std::floor((c.y1 - my) * H)), 0, img.height() - 1);
  int const x2 = std::clamp(static_cast<int>(std::ceil((c.x2 + mx) * W)), x1 + 1, img.width());
  int const y2 = std::clamp(static_cast<int>(std::ceil((c.y2 + my) * H)), y1 + 1, img.height());
  auto patch = augment::resize_bilinear(crop(img, x1, y1, x2 - x1, y2 - y1), side, side);
  return ImageInput::from_raster(std::move(patch), image.digest);
}

std::vector<Detection> verify_detections(ImageInput const& image,
                                         std::vector<Detection> dets,
                                         ModelBackend& classifier,
                                         VerifyOptions const& options) {
  options.validate();
  if (!classifier.info().can_classify) {
    fail(ErrorCode::kUnsupported,
         fmt::format("backend '{}' cannot classify", classifier.info().backend_id));
  }
  for (auto& d : dets) {
    auto const input = verification_crop(image, d, options.crop_margin,
                                         classifier.info().input_side);
    auto const r = classifier.classify(input);
    int const cls = detection_to_class_index(d.class_index);
    bool const agrees = r.top_class == cls ||
                        r.probs[static_cast<std::size_t>(cls)] >= options.agree_prob;
    d.status = agrees ? DetectionStatus::kVerified : DetectionStatus::kContested;
  }
  return dets;
}

}  // namespace paddy::inference
