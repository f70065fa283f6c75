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
#include <span>
#include <string>
#include <vector>

#include "paddy/metrics/report.hpp"

namespace paddy::metrics {

/// N×C matrix of predicted class probabilities, one row per instance.
class ProbMatrix {
 public:
  /// Throws InvalidInput unless every row has the same length, entries lie
  /// in [0,1], and each row sums to 1 within 1e-6.
  static ProbMatrix from_rows(std::vector<std::vector<double>> const& rows);
  /// Uniform 1/C over `instances` rows.
  static ProbMatrix uniform(std::size_t instances, std::size_t classes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t c) const {
    return data_[i * cols_ + c];
  }
  std::span<double const> row(std::size_t i) const {
    return std::span(data_).subspan(i * cols_, cols_);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline constexpr double kProbabilityFloor = 1e-12;

/// Mean categorical cross-entropy against one-hot labels:
/// -(1/N) Σ_i log p(i, label_i). Probabilities are floored at 1e-12 before
/// the log. Throws InvalidInput on shape or label-range mismatch, or N = 0.
double cross_entropy(ProbMatrix const& probs, std::span<int const> labels);

/// Index of the largest probability in each row; ties go to the lower index.
std::vector<int> argmax(ProbMatrix const& probs);

struct BinaryCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + tn + fp + fn; }
};

struct BinaryMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Accuracy, precision, recall and F1 with 0 for every zero denominator.
BinaryMetrics binary_metrics(BinaryCounts const& counts);

/// counts(t, p) = number of instances with true class t predicted as p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  std::size_t classes() const { return classes_; }
  std::int64_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  std::int64_t& operator()(std::size_t truth, std::size_t predicted) {
    return counts_[truth * classes_ + predicted];
  }
  std::int64_t total() const;
  std::int64_t trace() const;
  /// One-vs-rest counts for class `c`.
  BinaryCounts one_vs_rest(std::size_t c) const;

  friend bool operator==(ConfusionMatrix const&, ConfusionMatrix const&) =
      default;

 private:
  std::size_t classes_;
  std::vector<std::int64_t> counts_;
};

/// Throws InvalidInput on length mismatch or labels outside 0..classes-1.
ConfusionMatrix confusion(std::span<int const> predicted,
                          std::span<int const> truth, std::size_t classes);

struct ClassScores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;
};

struct ClassificationScores {
  double accuracy = 0;
  std::vector<ClassScores> per_class;
  ClassScores macro;
};

/// Overall accuracy is trace/N; per-class scores are one-vs-rest.
/// Throws InvalidInput when the matrix is empty (N = 0).
ClassificationScores classification_scores(ConfusionMatrix const& cm);

/// Table with precision / recall / f1 columns and an "accuracy" summary.
/// `labels` names the rows; defaults to the class index.
EvalReport classification_report(ConfusionMatrix const& cm,
                                 std::vector<std::string> labels = {});

}  // namespace paddy::metrics
