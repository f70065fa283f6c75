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

#include "paddy/core/taxonomy.hpp"

#include <array>
#include <string>

#include "paddy/core/error.hpp"

namespace paddy {
namespace {

using enum PathogenKind;

// Sorted by slug; the array position is the class index.
constexpr std::array<DiseaseClass, kNumClasses> kClasses{{
    {0, "bacterial_leaf_blight", "Bacterial leaf blight", kBacterial},
    {1, "bacterial_leaf_streak", "Bacterial leaf streak", kBacterial},
    {2, "bacterial_panicle_blight", "Bacterial panicle blight", kBacterial},
    {3, "black_stem_borer", "Black stem borer", kPest},
    {4, "blast", "Blast", kFungal},
    {5, "brown_spot", "Brown spot", kFungal},
    {6, "downy_mildew", "Downy mildew", kFungal},
    {7, "hispa", "Hispa", kPest},
    {8, "leaf_roller", "Leaf roller", kPest},
    {9, "normal", "Normal", kNone},
    {10, "tungro", "Tungro", kViral},
    {11, "white_stem_borer", "White stem borer", kPest},
    {12, "yellow_stem_borer", "Yellow stem borer", kPest},
}};

static_assert(kClasses[kNormalIndex].pathogen_kind == kNone);

}  // namespace

std::string_view to_string(PathogenKind kind) {
  switch (kind) {
    case kFungal: return "fungal";
    case kBacterial: return "bacterial";
    case kViral: return "viral";
    case kPest: return "pest";
    case kNone: return "none";
  }
  return "none";
}

std::span<DiseaseClass const> all_classes() { return kClasses; }

DiseaseClass const& disease_class(int class_index) {
  if (class_index < 0 || class_index >= kNumClasses) {
    fail(ErrorCode::kNotFound,
         "class index out of range: " + std::to_string(class_index));
  }
  return kClasses[static_cast<std::size_t>(class_index)];
}

int class_index(std::string_view slug) {
  for (auto const& c : kClasses) {
    if (c.slug == slug) return c.index;
  }
  fail(ErrorCode::kNotFound, "unknown class slug: " + std::string(slug));
}

std::string_view index_to_slug(int class_index) {
  return disease_class(class_index).slug;
}

PathogenKind pathogen_kind(int class_index) {
  return disease_class(class_index).pathogen_kind;
}

int detection_to_class_index(int detection_index) {
  if (detection_index < 0 || detection_index >= kNumDetectionClasses) {
    fail(ErrorCode::kNotFound, "detection class index out of range: " +
                                   std::to_string(detection_index));
  }
  return detection_index < kNormalIndex ? detection_index : detection_index + 1;
}

std::optional<int> class_to_detection_index(int class_index) {
  disease_class(class_index);
  if (class_index == kNormalIndex) return std::nullopt;
  return class_index < kNormalIndex ? class_index : class_index - 1;
}

int detection_index(std::string_view slug) {
  auto d = class_to_detection_index(class_index(slug));
  if (!d) fail(ErrorCode::kNotFound, "`normal` is not a detection class");
  return *d;
}

std::string_view detection_slug(int detection_index) {
  return index_to_slug(detection_to_class_index(detection_index));
}

}  // namespace paddy
