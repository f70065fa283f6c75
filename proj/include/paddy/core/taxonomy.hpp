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

#include <optional>
#include <span>
#include <string_view>

namespace paddy {

enum class PathogenKind { kFungal, kBacterial, kViral, kPest, kNone };

std::string_view to_string(PathogenKind kind);

struct DiseaseClass {
  int index;
  std::string_view slug;
  std::string_view display_name;
  PathogenKind pathogen_kind;
};

/// Classification uses all 13 classes, indexed in lexicographic slug order.
inline constexpr int kNumClasses = 13;
/// Detection uses the 12 disease classes (everything except `normal`),
/// indexed in the same relative order.
inline constexpr int kNumDetectionClasses = 12;
inline constexpr int kNormalIndex = 9;

std::span<DiseaseClass const> all_classes();
DiseaseClass const& disease_class(int class_index);

/// Throws NotFound for slugs outside the taxonomy.
int class_index(std::string_view slug);
std::string_view index_to_slug(int class_index);
PathogenKind pathogen_kind(int class_index);

int detection_index(std::string_view slug);
std::string_view detection_slug(int detection_index);
int detection_to_class_index(int detection_index);
std::optional<int> class_to_detection_index(int class_index);

}  // namespace paddy
