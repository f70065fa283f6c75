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

#include "paddy/metrics/detection.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::metrics {
namespace {

std::vector<std::size_t> by_descending_confidence(
    std::size_t n, auto const& confidence_of) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return confidence_of(a) > confidence_of(b);
                   });
  return order;
}

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double iou(CornerBox const& a, CornerBox const& b) {
  if (a.degenerate() || b.degenerate()) {
    fail(ErrorCode::kInvalidInput, "IoU of a zero-area box");
  }
  double const iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double const ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  double const inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

MatchResult match_detections(std::span<PredictedBox const> predictions,
                             std::span<GroundTruthBox const> ground_truth,
                             double iou_threshold) {
  MatchResult result;
  result.true_positive.assign(predictions.size(), false);
  result.matched_gt.assign(predictions.size(), std::nullopt);
  std::vector<bool> claimed(ground_truth.size(), false);

  auto const order = by_descending_confidence(
      predictions.size(),
      [&](std::size_t i) { return predictions[i].confidence; });
  for (auto const i : order) {
    auto const& pred = predictions[i];
    std::optional<std::size_t> best;
    double best_iou = -1;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (claimed[g] || ground_truth[g].class_index != pred.class_index) {
        continue;
      }
      double const overlap = iou(pred.box, ground_truth[g].box);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best = g;
        best_iou = overlap;
      }
    }
    if (best) {
      claimed[*best] = true;
      result.true_positive[i] = true;
      result.matched_gt[i] = best;
    }
  }
  result.unmatched_gt = static_cast<std::size_t>(
      std::count(claimed.begin(), claimed.end(), false));
  return result;
}

std::optional<double> average_precision(std::span<RankedHit const> hits,
                                        std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  auto const order = by_descending_confidence(
      hits.size(), [&](std::size_t i) { return hits[i].confidence; });

  // Sentinel points at recall 0 and the end of the curve, as in the
  // all-points (VOC 2010+) formulation.
  std::vector<double> recall{0.0};
  std::vector<double> precision{0.0};
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (hits[order[rank]].true_positive) ++tp;
    recall.push_back(safe_ratio(tp, gt_count));
    precision.push_back(safe_ratio(tp, rank + 1));
  }
  recall.push_back(recall.back());
  precision.push_back(0.0);

  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double area = 0;
  for (std::size_t i = 1; i < recall.size(); ++i) {
    if (recall[i] != recall[i - 1]) {
      area += (recall[i] - recall[i - 1]) * precision[i];
    }
  }
  return area;
}

DetectionEvaluation evaluate_detections(std::span<ImageBoxes const> images,
                                        int num_classes,
                                        DetectionEvalOptions const& options) {
  if (num_classes <= 0) fail(ErrorCode::kInvalidInput, "no classes");
  auto const k = static_cast<std::size_t>(num_classes);
  std::vector<std::vector<RankedHit>> hits(k);
  std::vector<std::size_t> gt_count(k, 0);

  auto check_class = [&](int c) {
    if (c < 0 || c >= num_classes) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("class {} outside 0..{}", c, num_classes - 1));
    }
  };
  for (auto const& image : images) {
    for (auto const& gt : image.ground_truth) {
      check_class(gt.class_index);
      ++gt_count[static_cast<std::size_t>(gt.class_index)];
    }
    for (auto const& p : image.predictions) check_class(p.class_index);
    auto const match = match_detections(image.predictions, image.ground_truth,
                                        options.iou_threshold);
    for (std::size_t i = 0; i < image.predictions.size(); ++i) {
      auto const& p = image.predictions[i];
      hits[static_cast<std::size_t>(p.class_index)].push_back(
          {p.confidence, match.true_positive[i]});
    }
  }
  if (std::all_of(gt_count.begin(), gt_count.end(),
                  [](std::size_t n) { return n == 0; })) {
    fail(ErrorCode::kInvalidInput, "no ground-truth boxes to evaluate against");
  }

  DetectionEvaluation eval;
  for (std::size_t c = 0; c < k; ++c) {
    auto const ap = average_precision(hits[c], gt_count[c]);
    if (!ap) continue;
    std::size_t op_tp = 0;
    std::size_t op_total = 0;
    for (auto const& h : hits[c]) {
      if (h.confidence < options.operating_confidence) continue;
      ++op_total;
      if (h.true_positive) ++op_tp;
    }
    eval.per_class.push_back({static_cast<int>(c), *ap,
                              safe_ratio(op_tp, op_total),
                              safe_ratio(op_tp, gt_count[c]), gt_count[c],
                              hits[c].size()});
  }
  auto const n = static_cast<double>(eval.per_class.size());
  for (auto const& row : eval.per_class) {
    eval.map50 += row.ap / n;
    eval.mean_box_precision += row.box_precision / n;
    eval.mean_box_recall += row.box_recall / n;
  }
  return eval;
}

EvalReport detection_report(DetectionEvaluation const& eval,
                            std::vector<std::string> const& class_names,
                            DetectionEvalOptions const& options) {
  std::vector<ReportRow> rows;
  for (auto const& c : eval.per_class) {
    auto const idx = static_cast<std::size_t>(c.class_index);
    if (idx >= class_names.size()) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("no name for class {}", c.class_index));
    }
    rows.push_back({class_names[idx],
                    {percent(c.box_precision), percent(c.box_recall),
                     percent(c.ap)}});
  }
  auto report = make_report("Detection results",
                            {"box_precision", "box_recall", "map50"},
                            std::move(rows));
  report.metadata["iou_threshold"] = fmt::format("{}", options.iou_threshold);
  report.metadata["averaging"] = "macro over classes present in ground truth";
  report.metadata["operating_point"] =
      options.operating_confidence > 0
          ? fmt::format("predictions with confidence >= {}",
                        options.operating_confidence)
          : "all retained (post-NMS) predictions";
  return report;
}

}  // namespace paddy::metrics
