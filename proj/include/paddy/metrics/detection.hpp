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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paddy/core/geometry.hpp"
#include "paddy/metrics/report.hpp"

namespace paddy::metrics {

/// Intersection over union. Throws InvalidInput if either box has zero area.
double iou(CornerBox const& a, CornerBox const& b);

struct PredictedBox {
  int class_index = 0;
  double confidence = 0;
  CornerBox box;
};

struct GroundTruthBox {
  int class_index = 0;
  CornerBox box;
};

struct MatchResult {
  /// Indexed like the input predictions.
  std::vector<bool> true_positive;
  /// matched_gt[i] is the ground-truth index claimed by prediction i.
  std::vector<std::optional<std::size_t>> matched_gt;
  std::size_t unmatched_gt = 0;
};

/// Greedy matching for one image. Predictions are visited by descending
/// confidence (stable on ties); each claims the same-class, still-unmatched
/// ground truth with the highest IoU, provided IoU >= iou_threshold.
MatchResult match_detections(std::span<PredictedBox const> predictions,
                             std::span<GroundTruthBox const> ground_truth,
                             double iou_threshold);

struct RankedHit {
  double confidence = 0;
  bool true_positive = false;
};

/// All-points interpolated area under the precision/recall curve, with
/// precision replaced by its running maximum from the right. Hits are
/// ranked by descending confidence (stable). Returns nullopt when
/// gt_count == 0, which excludes the class from any mean.
std::optional<double> average_precision(std::span<RankedHit const> hits,
                                        std::size_t gt_count);

struct ImageBoxes {
  std::vector<PredictedBox> predictions;
  std::vector<GroundTruthBox> ground_truth;
};

struct DetectionEvalOptions {
  double iou_threshold = 0.5;
  /// Box precision and recall count only predictions at or above this
  /// confidence. AP always uses every prediction. 0 means all retained
  /// predictions form the operating point.
  double operating_confidence = 0.0;
};

struct ClassAP {
  int class_index = 0;
  double ap = 0;
  double box_precision = 0;
  double box_recall = 0;
  std::size_t gt_count = 0;
  std::size_t prediction_count = 0;
};

struct DetectionEvaluation {
  /// Only classes with at least one ground-truth box, ascending index.
  std::vector<ClassAP> per_class;
  double map50 = 0;
  double mean_box_precision = 0;
  double mean_box_recall = 0;
};

/// Per-class AP and box precision/recall over a set of images, then the
/// unweighted mean over classes present in the ground truth. Throws
/// InvalidInput when there is no ground truth at all.
DetectionEvaluation evaluate_detections(std::span<ImageBoxes const> images,
                                        int num_classes,
                                        DetectionEvalOptions const& options = {});

/// Table with box_precision / box_recall / map50 columns. `class_names`
/// maps class indices to row labels.
EvalReport detection_report(DetectionEvaluation const& eval,
                            std::vector<std::string> const& class_names,
                            DetectionEvalOptions const& options = {});

inline EvalReport detection_report(std::span<ImageBoxes const> images,
                                   std::vector<std::string> const& class_names,
                                   DetectionEvalOptions const& options = {}) {
  return detection_report(
      evaluate_detections(images, static_cast<int>(class_names.size()),
                          options),
      class_names, options);
}

}  // namespace paddy::metrics
