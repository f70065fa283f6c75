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
#include <vector>

#include "paddy/metrics/detection.hpp"
#include "paddy/metrics/report.hpp"

namespace paddy::cli {

struct ClassificationRow {
  std::string id;
  std::vector<double> probs;
};

/// CSV with header `id,prob_0,...,prob_12`.
std::vector<ClassificationRow> parse_classification_predictions(std::string_view text,
                                                                std::string_view source);
/// CSV with header `id,class`; the class is a slug or an index.
std::vector<std::pair<std::string, int>> parse_labels(std::string_view text,
                                                      std::string_view source);

/// Joins predictions to labels by id and reports per-class precision,
/// recall and F1 with accuracy and cross-entropy in the summary.
metrics::EvalReport eval_classify(std::filesystem::path const& predictions,
                                  std::filesystem::path const& labels);

/// Lines of `class confidence cx cy w h` with detection class indices.
std::vector<metrics::PredictedBox> parse_detection_predictions(std::string_view text,
                                                               std::string_view source);

/// Pairs `<name>.txt` ground-truth files with same-named prediction files.
/// A missing prediction file means no detections; a prediction file
/// without ground truth is an image with nothing to find.
std::vector<metrics::ImageBoxes> load_detection_set(std::filesystem::path const& predictions_dir,
                                                    std::filesystem::path const& truth_dir);

metrics::EvalReport eval_detect(std::filesystem::path const& predictions_dir,
                                std::filesystem::path const& truth_dir,
                                metrics::DetectionEvalOptions const& options = {});

}  // namespace paddy::cli
