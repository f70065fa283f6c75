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

#include <vector>

#include "paddy/inference/backend.hpp"

namespace paddy::inference {

struct DetectOptions {
  double conf_threshold = 0.25;
  double nms_iou = 0.45;

  /// Throws InvalidInput unless both thresholds lie in (0, 1).
  void validate() const;
};

struct VerifyOptions {
  /// Added on every side, as a fraction of the box size.
  double crop_margin = 0.1;
  double agree_prob = 0.3;

  void validate() const;
};

/// Throws Unsupported without the classify capability.
ClassificationResult classify(ModelBackend& backend, ImageInput const& image);

/// Greedy class-wise suppression: keeps the most confident remaining
/// detection and drops same-class detections with IoU ≥ threshold against
/// it. Ties keep input order. Survivors are marked kept and returned by
/// descending confidence.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

/// Raw detections filtered by confidence, then suppressed.
std::vector<Detection> detect(ModelBackend& backend, ImageInput const& image,
                              DetectOptions const& options = {});

/// The classifier input for one detection: the box grown by the margin,
/// clipped to the frame, resized to side×side.
ImageInput verification_crop(ImageInput const& image, Detection const& det,
                             double crop_margin, int side);

/// Classifies each detection's crop and sets its status to verified or
/// contested. Nothing else about the detections changes.
std::vector<Detection> verify_detections(ImageInput const& image,
                                         std::vector<Detection> dets,
                                         ModelBackend& classifier,
                                         VerifyOptions const& options = {});

}  // namespace paddy::inference
