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

#include "paddy/augment/annotation_io.hpp"

#include <charconv>
#include <system_error>

#include <fmt/format.h>

#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::augment {
namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t const start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

}  // namespace

std::vector<LabeledBox> parse_annotations(std::string_view text,
                                          std::string_view source) {
  std::vector<LabeledBox> boxes;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto const nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto const tokens = tokenize(line);
    if (tokens.empty()) continue;
    auto error = [&](std::size_t column, std::string const& msg) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("{}:{}:{}: {}", source, line_no, column, msg));
    };
    if (tokens.size() != 5) {
      error(tokens.front().column,
            fmt::format("expected 5 fields, found {}", tokens.size()));
    }

    LabeledBox lb;
    auto const& ct = tokens[0].text;
    auto [cp, cec] = std::from_chars(ct.data(), ct.data() + ct.size(), lb.class_index);
    if (cec != std::errc{} || cp != ct.data() + ct.size()) {
      error(tokens[0].column, fmt::format("bad class index '{}'", ct));
    }
    if (lb.class_index < 0 || lb.class_index >= kNumDetectionClasses) {
      error(tokens[0].column,
            fmt::format("class index {} out of range [0, {})", lb.class_index,
                        kNumDetectionClasses));
    }
    double* fields[] = {&lb.box.cx, &lb.box.cy, &lb.box.w, &lb.box.h};
    for (std::size_t k = 0; k < 4; ++k) {
      auto const& t = tokens[k + 1];
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(),
                                     *fields[k]);
      if (ec != std::errc{} || p != t.text.data() + t.text.size()) {
        error(t.column, fmt::format("bad number '{}'", t.text));
      }
    }
    if (!lb.box.valid() || !lb.box.inside_frame()) {
      error(tokens[1].column, "box must have positive size and lie inside the frame");
    }
    boxes.push_back(lb);
  }
  return boxes;
}

std::string format_annotations(std::span<LabeledBox const> boxes) {
  std::string out;
  for (auto const& b : boxes) {
    out += fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}\n", b.class_index,
                       b.box.cx, b.box.cy, b.box.w, b.box.h);
  }
  return out;
}

std::vector<LabeledBox> read_annotations(std::filesystem::path const& path) {
  return parse_annotations(read_file(path), path.string());
}

void write_annotations(std::filesystem::path const& path,
                       std::span<LabeledBox const> boxes) {
  write_file_atomic(path, format_annotations(boxes));
}

std::filesystem::path annotation_path_for(std::filesystem::path const& image) {
  auto p = image;
  p.replace_extension(".txt");
  return p;
}

}  // namespace paddy::augment
