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

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace paddy::metrics {

struct ReportRow {
  std::string label;
  /// Percentages, unrounded. Rounding happens only when rendering.
  std::vector<double> values;

  friend bool operator==(ReportRow const&, ReportRow const&) = default;
};

/// Per-class metric table with a trailing macro-average "all" row, laid out
/// like the published result tables.
struct EvalReport {
  std::string title;
  std::vector<std::string> columns;
  std::vector<ReportRow> rows;
  ReportRow all;
  /// Whole-dataset scalars that have no per-class breakdown (accuracy, loss).
  std::map<std::string, double> summary;
  std::map<std::string, std::string> metadata;

  friend bool operator==(EvalReport const&, EvalReport const&) = default;
};

/// Builds a report whose "all" row is the unweighted mean of `rows`.
/// Throws InvalidInput on ragged rows or an empty table.
EvalReport make_report(std::string title, std::vector<std::string> columns,
                       std::vector<ReportRow> rows);

/// Aligned plain-text table, one decimal per value.
std::string render_text(EvalReport const& report);

/// Rows as objects keyed by "class" plus the column names, "all" last.
nlohmann::json to_json(EvalReport const& report);
EvalReport report_from_json(nlohmann::json const& doc);

/// Converts a fraction in [0,1] to the percentage scale used in reports.
inline double percent(double fraction) { return fraction * 100.0; }

}  // namespace paddy::metrics
