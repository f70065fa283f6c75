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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paddy/augment/transform.hpp"

namespace paddy::augment {

/// Parses `class cx cy w h` lines. Blank lines are skipped. Errors are
/// InvalidInput with a `source:line:column:` prefix.
std::vector<LabeledBox> parse_annotations(std::string_view text,
                                          std::string_view source = "<input>");

/// One line per box with six decimals.
std::string format_annotations(std::span<LabeledBox const> boxes);

std::vector<LabeledBox> read_annotations(std::filesystem::path const& path);
void write_annotations(std::filesystem::path const& path,
                       std::span<LabeledBox const> boxes);

/// `image.jpg` → `image.txt` in the same directory.
std::filesystem::path annotation_path_for(std::filesystem::path const& image);

}  // namespace paddy::augment
