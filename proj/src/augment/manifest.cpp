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

#include "paddy/augment/manifest.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include <fmt/format.h>

#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::augment {
namespace {

enum class Column { kId, kPath, kSplit, kClassSlug, kSourceId };

constexpr std::array<std::pair<std::string_view, Column>, 5> kColumns{{
    {"id", Column::kId},
    {"path", Column::kPath},
    {"split", Column::kSplit},
    {"class_slug", Column::kClassSlug},
    {"source_id", Column::kSourceId},
}};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    auto const comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::string& field_of(ManifestRow& row, Column c) {
  switch (c) {
    case Column::kId: return row.id;
    case Column::kPath: return row.path;
    case Column::kSplit: return row.split;
    case Column::kClassSlug: return row.class_slug;
    case Column::kSourceId: return row.source_id;
  }
  return row.id;
}

void check_field(std::string_view value, std::string_view what) {
  if (value.find_first_of(",\"\r\n") != std::string_view::npos) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("{} '{}' contains a comma, quote or newline", what, value));
  }
}

}  // namespace

DatasetManifest DatasetManifest::parse(std::string_view csv,
                                       std::string_view source) {
  std::vector<Column> layout;
  DatasetManifest m;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    ++line_no;
    auto const nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto error = [&](std::string const& msg) {
      fail(ErrorCode::kInvalidInput, fmt::format("{}:{}: {}", source, line_no, msg));
    };
    auto const fields = split_fields(line);

    if (layout.empty()) {
      for (auto f : fields) {
        auto it = std::find_if(kColumns.begin(), kColumns.end(),
                               [&](auto const& c) { return c.first == f; });
        if (it == kColumns.end()) error(fmt::format("unknown column '{}'", f));
        if (std::find(layout.begin(), layout.end(), it->second) != layout.end()) {
          error(fmt::format("duplicate column '{}'", f));
        }
        layout.push_back(it->second);
      }
      for (Column required : {Column::kId, Column::kPath}) {
        if (std::find(layout.begin(), layout.end(), required) == layout.end()) {
          error("header must name the id and path columns");
        }
      }
      continue;
    }

    if (fields.size() != layout.size()) {
      error(fmt::format("expected {} fields, found {}", layout.size(), fields.size()));
    }
    ManifestRow row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      field_of(row, layout[i]) = std::string(fields[i]);
    }
    if (row.id.empty() || row.path.empty()) error("id and path must be non-empty");
    if (!row.split.empty() && row.split != "train" && row.split != "test") {
      error(fmt::format("split '{}' must be train, test or empty", row.split));
    }
    if (!row.class_slug.empty()) {
      try {
        class_index(row.class_slug);
      } catch (Error const&) {
        error(fmt::format("unknown class '{}'", row.class_slug));
      }
    }
    if (!ids.insert(row.id).second) error(fmt::format("duplicate id '{}'", row.id));
    m.rows.push_back(std::move(row));
  }
  if (layout.empty()) {
    fail(ErrorCode::kInvalidInput, fmt::format("{}: missing header", source));
  }
  return m;
}

DatasetManifest DatasetManifest::load(std::filesystem::path const& path) {
  return parse(read_file(path), path.string());
}

std::string DatasetManifest::to_csv() const {
  bool const with_class = std::any_of(rows.begin(), rows.end(),
                                      [](auto const& r) { return !r.class_slug.empty(); });
  bool const with_source = std::any_of(rows.begin(), rows.end(),
                                       [](auto const& r) { return !r.source_id.empty(); });
  std::string out = "id,path,split";
  if (with_class) out += ",class_slug";
  if (with_source) out += ",source_id";
  out += '\n';
  for (auto const& r : rows) {
    check_field(r.id, "id");
    check_field(r.path, "path");
    check_field(r.split, "split");
    check_field(r.class_slug, "class_slug");
    check_field(r.source_id, "source_id");
    out += fmt::format("{},{},{}", r.id, r.path, r.split);
    if (with_class) out += "," + r.class_slug;
    if (with_source) out += "," + r.source_id;
    out += '\n';
  }
  return out;
}

void DatasetManifest::save(std::filesystem::path const& path) const {
  write_file_atomic(path, to_csv());
}

bool DatasetManifest::is_split() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](auto const& r) {
    return r.split == "train" || r.split == "test";
  });
}

std::optional<ManifestRow> DatasetManifest::find(std::string_view id) const {
  for (auto const& r : rows) {
    if (r.id == id) return r;
  }
  return std::nullopt;
}

std::vector<std::string> DatasetManifest::ids() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (auto const& r : rows) out.push_back(r.id);
  return out;
}

}  // namespace paddy::augment
