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

#include "paddy/metrics/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::metrics {

EvalReport make_report(std::string title, std::vector<std::string> columns,
                       std::vector<ReportRow> rows) {
  if (rows.empty()) fail(ErrorCode::kInvalidInput, "report has no rows");
  std::vector<double> sums(columns.size(), 0.0);
  for (auto const& row : rows) {
    if (row.values.size() != columns.size()) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("row `{}` has {} values for {} columns", row.label,
                       row.values.size(), columns.size()));
    }
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] += row.values[c];
  }
  EvalReport report;
  report.title = std::move(title);
  report.columns = std::move(columns);
  report.all.label = "all";
  for (double s : sums) {
    report.all.values.push_back(s / static_cast<double>(rows.size()));
  }
  report.rows = std::move(rows);
  return report;
}

std::string render_text(EvalReport const& report) {
  std::size_t label_width = std::string_view("Class").size();
  for (auto const& row : report.rows) {
    label_width = std::max(label_width, row.label.size());
  }
  std::vector<std::size_t> widths;
  for (auto const& c : report.columns) widths.push_back(std::max<std::size_t>(c.size(), 6));

  std::string out;
  if (!report.title.empty()) out += report.title + "\n";
  out += fmt::format("{:<{}}", "Class", label_width);
  for (std::size_t c = 0; c < report.columns.size(); ++c) {
    out += fmt::format("  {:>{}}", report.columns[c], widths[c]);
  }
  out += "\n";
  auto emit = [&](ReportRow const& row) {
    out += fmt::format("{:<{}}", row.label, label_width);
    for (std::size_t c = 0; c < row.values.size(); ++c) {
      out += fmt::format("  {:>{}.1f}", row.values[c], widths[c]);
    }
    out += "\n";
  };
  emit(report.all);
  for (auto const& row : report.rows) emit(row);
  for (auto const& [name, value] : report.summary) {
    out += fmt::format("{}: {:.1f}\n", name, value);
  }
  for (auto const& [key, value] : report.metadata) {
    out += fmt::format("# {}: {}\n", key, value);
  }
  return out;
}

nlohmann::json to_json(EvalReport const& report) {
  auto row_json = [&](ReportRow const& row) {
    nlohmann::json r = nlohmann::json::object();
    r["class"] = row.label;
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      r[report.columns[c]] = row.values[c];
    }
    return r;
  };
  nlohmann::json rows = nlohmann::json::array();
  for (auto const& row : report.rows) rows.push_back(row_json(row));
  rows.push_back(row_json(report.all));

  return {{"title", report.title},
          {"columns", report.columns},
          {"rows", std::move(rows)},
          {"summary", report.summary},
          {"metadata", report.metadata}};
}

EvalReport report_from_json(nlohmann::json const& doc) {
  try {
    EvalReport report;
    report.title = doc.at("title").get<std::string>();
    report.columns = doc.at("columns").get<std::vector<std::string>>();
    auto const& rows = doc.at("rows");
    if (rows.empty() || rows.back().at("class") != "all") {
      fail(ErrorCode::kInvalidInput, "report rows must end with `all`");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ReportRow row;
      row.label = rows[i].at("class").get<std::string>();
      for (auto const& c : report.columns) {
        row.values.push_back(rows[i].at(c).get<double>());
      }
      if (i + 1 == rows.size()) {
        report.all = std::move(row);
      } else {
        report.rows.push_back(std::move(row));
      }
    }
    report.summary = doc.at("summary").get<std::map<std::string, double>>();
    report.metadata =
        doc.at("metadata").get<std::map<std::string, std::string>>();
    return report;
  } catch (nlohmann::json::exception const& e) {
    fail(ErrorCode::kInvalidInput, std::string("malformed report: ") + e.what());
  }
}

}  // namespace paddy::metrics
