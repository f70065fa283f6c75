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

#include "paddy/metrics/classification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::metrics {
namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double precision, double recall) {
  double const s = precision + recall;
  return s == 0.0 ? 0.0 : 2.0 * precision * recall / s;
}

void check_label(int label, std::size_t classes, char const* what) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{} label {} outside 0..{}", what, label, classes - 1));
  }
}

}  // namespace

ProbMatrix ProbMatrix::from_rows(std::vector<std::vector<double>> const& rows) {
  ProbMatrix m;
  m.rows_ = rows.size();
  m.cols_ = rows.empty() ? 0 : rows.front().size();
  m.data_.reserve(m.rows_ * m.cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto const& r = rows[i];
    if (r.size() != m.cols_ || r.empty()) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("probability row {} has {} entries, expected {}", i,
                       r.size(), m.cols_));
    }
    double sum = 0;
    for (double p : r) {
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorCode::kInvalidInput,
             fmt::format("probability row {} has entry {} outside [0,1]", i, p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("probability row {} sums to {}", i, sum));
    }
    m.data_.insert(m.data_.end(), r.begin(), r.end());
  }
  return m;
}

ProbMatrix ProbMatrix::uniform(std::size_t instances, std::size_t classes) {
  if (classes == 0) fail(ErrorCode::kInvalidInput, "zero classes");
  ProbMatrix m;
  m.rows_ = instances;
  m.cols_ = classes;
  m.data_.assign(instances * classes, 1.0 / static_cast<double>(classes));
  return m;
}

double cross_entropy(ProbMatrix const& probs, std::span<int const> labels) {
  if (probs.rows() != labels.size()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{} probability rows for {} labels", probs.rows(),
                     labels.size()));
  }
  if (labels.empty()) fail(ErrorCode::kInvalidInput, "no instances");
  double total = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check_label(labels[i], probs.cols(), "true");
    double const p = std::max(probs(i, static_cast<std::size_t>(labels[i])),
                              kProbabilityFloor);
    total -= std::log(p);
  }
  return total / static_cast<double>(labels.size());
}

std::vector<int> argmax(ProbMatrix const& probs) {
  std::vector<int> out;
  out.reserve(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    auto r = probs.row(i);
    out.push_back(static_cast<int>(std::max_element(r.begin(), r.end()) -
                                   r.begin()));
  }
  return out;
}

BinaryMetrics binary_metrics(BinaryCounts const& c) {
  BinaryMetrics m;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = harmonic(m.precision, m.recall);
  return m;
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t t = 0;
  for (std::size_t c = 0; c < classes_; ++c) t += (*this)(c, c);
  return t;
}

BinaryCounts ConfusionMatrix::one_vs_rest(std::size_t c) const {
  BinaryCounts b;
  for (std::size_t t = 0; t < classes_; ++t) {
    for (std::size_t p = 0; p < classes_; ++p) {
      auto const n = (*this)(t, p);
      if (t == c && p == c) {
        b.tp += n;
      } else if (t == c) {
        b.fn += n;
      } else if (p == c) {
        b.fp += n;
      } else {
        b.tn += n;
      }
    }
  }
  return b;
}

ConfusionMatrix confusion(std::span<int const> predicted,
                          std::span<int const> truth, std::size_t classes) {
  if (predicted.size() != truth.size()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{} predictions for {} labels", predicted.size(),
                     truth.size()));
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    check_label(truth[i], classes, "true");
    check_label(predicted[i], classes, "predicted");
    ++cm(static_cast<std::size_t>(truth[i]),
         static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

ClassificationScores classification_scores(ConfusionMatrix const& cm) {
  auto const n = cm.total();
  if (n == 0) fail(ErrorCode::kInvalidInput, "confusion matrix is empty");
  ClassificationScores s;
  s.accuracy = ratio(cm.trace(), n);
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    auto const counts = cm.one_vs_rest(c);
    auto const m = binary_metrics(counts);
    s.per_class.push_back({m.precision, m.recall, m.f1, counts.tp + counts.fn});
  }
  auto const k = static_cast<double>(cm.classes());
  for (auto const& pc : s.per_class) {
    s.macro.precision += pc.precision / k;
    s.macro.recall += pc.recall / k;
    s.macro.f1 += pc.f1 / k;
    s.macro.support += pc.support;
  }
  return s;
}

EvalReport classification_report(ConfusionMatrix const& cm,
                                  std::vector<std::string> labels) {
  auto const scores = classification_scores(cm);
  if (!labels.empty() && labels.size() != cm.classes()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{} labels for {} classes", labels.size(), cm.classes()));
  }
  std::vector<ReportRow> rows;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    auto const& pc = scores.per_class[c];
    rows.push_back({labels.empty() ? std::to_string(c) : labels[c],
                    {percent(pc.precision), percent(pc.recall), percent(pc.f1)}});
  }
  auto report = make_report("Classification results",
                            {"precision", "recall", "f1"}, std::move(rows));
  report.summary["accuracy"] = percent(scores.accuracy);
  report.metadata["averaging"] = "macro (unweighted mean over classes)";
  report.metadata["instances"] = std::to_string(cm.total());
  return report;
}

}  // namespace paddy::metrics
