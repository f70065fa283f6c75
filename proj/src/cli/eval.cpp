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

#include "paddy/cli/eval.hpp"

#include <charconv>
#include <map>
#include <set>

#include <fmt/format.h>

#include "paddy/augment/annotation_io.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/geometry.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"
#include "paddy/metrics/classification.hpp"

namespace paddy::cli {

namespace fs = std::filesystem;

namespace {

struct Field {
  std::string_view text;
  std::size_t column = 1;
};

struct Line {
  std::size_t number = 0;
  std::vector<Field> fields;
};

/// Non-blank lines split on `sep` (or on runs of blanks when sep is ' ').
std::vector<Line> tokenize(std::string_view text, char sep) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    auto const nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Line out{number, {}};
    if (sep == ' ') {
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        out.fields.push_back({line.substr(i, j - i), i + 1});
        i = j;
      }
    } else {
      std::size_t start = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
          out.fields.push_back({line.substr(start, i - start), start + 1});
          start = i + 1;
        }
      }
    }
    lines.push_back(std::move(out));
  }
  return lines;
}

[[noreturn]] void parse_error(std::string_view source, Line const& line, std::size_t column,
                              std::string const& msg) {
  fail(ErrorCode::kInvalidInput, fmt::format("{}:{}:{}: {}", source, line.number, column, msg));
}

double number(std::string_view source, Line const& line, Field const& f) {
  double v = 0;
  auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
  if (ec != std::errc{} || p != f.text.data() + f.text.size() || !std::isfinite(v)) {
    parse_error(source, line, f.column, fmt::format("'{}' is not a number", f.text));
  }
  return v;
}

int integer(std::string_view source, Line const& line, Field const& f) {
  int v = 0;
  auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
  if (ec != std::errc{} || p != f.text.data() + f.text.size()) {
    parse_error(source, line, f.column, fmt::format("'{}' is not an integer", f.text));
  }
  return v;
}

std::vector<std::string> class_slugs(int n, bool detection) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.emplace_back(detection ? detection_slug(i) : index_to_slug(i));
  }
  return out;
}

}  // namespace

std::vector<ClassificationRow> parse_classification_predictions(std::string_view text,
                                                                std::string_view source) {
  auto const lines = tokenize(text, ',');
  if (lines.empty()) fail(ErrorCode::kInvalidInput, fmt::format("{}: missing header", source));
  auto const& header = lines.front();
  if (header.fields.size() != kNumClasses + 1 || header.fields[0].text != "id") {
    parse_error(source, header, 1, fmt::format("header must be id,prob_0..prob_{}", kNumClasses - 1));
  }
  for (int c = 0; c < kNumClasses; ++c) {
    auto const& f = header.fields[static_cast<std::size_t>(c) + 1];
    if (f.text != fmt::format("prob_{}", c)) {
      parse_error(source, header, f.column, fmt::format("expected column prob_{}", c));
    }
  }
  std::vector<ClassificationRow> rows;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto const& line = lines[i];
    if (line.fields.size() != kNumClasses + 1) {
      parse_error(source, line, 1,
                  fmt::format("expected {} fields, found {}", kNumClasses + 1, line.fields.size()));
    }
    ClassificationRow row{std::string(line.fields[0].text), {}};
    if (row.id.empty()) parse_error(source, line, 1, "empty id");
    if (!seen.insert(row.id).second) parse_error(source, line, 1, fmt::format("duplicate id '{}'", row.id));
    double sum = 0;
    for (std::size_t c = 1; c < line.fields.size(); ++c) {
      double const p = number(source, line, line.fields[c]);
      if (p < 0 || p > 1) parse_error(source, line, line.fields[c].column, "probability outside [0, 1]");
      row.probs.push_back(p);
      sum += p;
    }
    if (std::abs(sum - 1) > 1e-6) {
      parse_error(source, line, 1, fmt::format("probabilities sum to {:.9g}, not 1", sum));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::pair<std::string, int>> parse_labels(std::string_view text, std::string_view source) {
  auto const lines = tokenize(text, ',');
  if (lines.empty()) fail(ErrorCode::kInvalidInput, fmt::format("{}: missing header", source));
  auto const& header = lines.front();
  if (header.fields.size() != 2 || header.fields[0].text != "id" || header.fields[1].text != "class") {
    parse_error(source, header, 1, "header must be id,class");
  }
  std::vector<std::pair<std::string, int>> out;
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto const& line = lines[i];
    if (line.fields.size() != 2) {
      parse_error(source, line, 1, fmt::format("expected 2 fields, found {}", line.fields.size()));
    }
    auto const& f = line.fields[1];
    int cls = -1;
    if (!f.text.empty() && std::isdigit(static_cast<unsigned char>(f.text[0]))) {
      cls = integer(source, line, f);
      if (cls < 0 || cls >= kNumClasses) parse_error(source, line, f.column, "class index out of range");
    } else {
      try {
        cls = class_index(f.text);
      } catch (Error const&) {
        parse_error(source, line, f.column, fmt::format("unknown class '{}'", f.text));
      }
    }
    std::string id(line.fields[0].text);
    if (id.empty()) parse_error(source, line, 1, "empty id");
    if (!seen.insert(id).second) parse_error(source, line, 1, fmt::format("duplicate id '{}'", id));
    out.emplace_back(std::move(id), cls);
  }
  return out;
}

metrics::EvalReport eval_classify(fs::path const& predictions, fs::path const& labels) {
  auto const preds = parse_classification_predictions(read_file(predictions), predictions.string());
  auto const truth = parse_labels(read_file(labels), labels.string());
  if (truth.empty()) fail(ErrorCode::kInvalidInput, fmt::format("{}: no labels", labels.string()));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < preds.size(); ++i) index[preds[i].id] = i;

  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (auto const& [id, cls] : truth) {
    auto it = index.find(id);
    if (it == index.end()) {
      fail(ErrorCode::kInvalidInput, fmt::format("{}: no prediction for '{}'", predictions.string(), id));
    }
    rows.push_back(preds[it->second].probs);
    y.push_back(cls);
    index.erase(it);
  }
  if (!index.empty()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{}: prediction '{}' has no label", predictions.string(), index.begin()->first));
  }
  auto const probs = metrics::ProbMatrix::from_rows(rows);
  auto const predicted = metrics::argmax(probs);
  auto const cm = metrics::confusion(predicted, y, kNumClasses);
  auto report = metrics::classification_report(cm, class_slugs(kNumClasses, false));
  report.summary["cross_entropy"] = metrics::cross_entropy(probs, y);
  return report;
}

std::vector<metrics::PredictedBox> parse_detection_predictions(std::string_view text,
                                                               std::string_view source) {
  std::vector<metrics::PredictedBox> out;
  for (auto const& line : tokenize(text, ' ')) {
    if (line.fields.size() != 6) {
      parse_error(source, line, 1, fmt::format("expected 6 fields, found {}", line.fields.size()));
    }
    int const cls = integer(source, line, line.fields[0]);
    if (cls < 0 || cls >= kNumDetectionClasses) {
      parse_error(source, line, 1, fmt::format("class {} outside 0..{}", cls, kNumDetectionClasses - 1));
    }
    double const conf = number(source, line, line.fields[1]);
    if (conf < 0 || conf > 1) parse_error(source, line, line.fields[1].column, "confidence outside [0, 1]");
    NormalizedBox box{number(source, line, line.fields[2]), number(source, line, line.fields[3]),
                      number(source, line, line.fields[4]), number(source, line, line.fields[5])};
    if (!box.valid()) parse_error(source, line, line.fields[2].column, "box outside the unit frame");
    out.push_back({cls, conf, box.corners()});
  }
  return out;
}

std::vector<metrics::ImageBoxes> load_detection_set(fs::path const& predictions_dir,
                                                    fs::path const& truth_dir) {
  for (auto const& d : {predictions_dir, truth_dir}) {
    if (!fs::is_directory(d)) fail(ErrorCode::kNotFound, fmt::format("{} is not a directory", d.string()));
  }
  std::set<std::string> names;
  for (auto const& d : {predictions_dir, truth_dir}) {
    for (auto const& e : fs::directory_iterator(d)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") names.insert(e.path().filename().string());
    }
  }
  std::vector<metrics::ImageBoxes> images;
  for (auto const& name : names) {
    metrics::ImageBoxes img;
    if (auto gt = truth_dir / name; fs::exists(gt)) {
      for (auto const& b : augment::read_annotations(gt)) {
        img.ground_truth.push_back({b.class_index, b.box.corners()});
      }
    }
    if (auto pred = predictions_dir / name; fs::exists(pred)) {
      img.predictions = parse_detection_predictions(read_file(pred), pred.string());
    }
    images.push_back(std::move(img));
  }
  return images;
}

metrics::EvalReport eval_detect(fs::path const& predictions_dir, fs::path const& truth_dir,
                                metrics::DetectionEvalOptions const& options) {
  auto const images = load_detection_set(predictions_dir, truth_dir);
  auto report = metrics::detection_report(images, class_slugs(kNumDetectionClasses, true), options);
  report.metadata["images"] = std::to_string(images.size());
  return report;
}

}  // namespace paddy::cli
