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

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "paddy/core/taxonomy.hpp"

namespace paddy {

struct TreatmentEntry {
  int class_index = 0;
  std::string summary;
  std::vector<std::string> actions;

  friend bool operator==(TreatmentEntry const&, TreatmentEntry const&) =
      default;
};

/// Recommendation knowledge base, one entry per taxonomy class. Loaded from
/// a JSON array of {slug, summary, actions[]} and immutable afterwards.
class TreatmentKb {
 public:
  /// Throws InvalidInput when the document is malformed, misses a class,
  /// lists one twice, gives a disease no actions, or gives `normal` any.
  static TreatmentKb parse(std::string_view json_text);
  static TreatmentKb load(std::filesystem::path const& path);
  /// The knowledge base shipped in data/treatments.json.
  static TreatmentKb load_bundled();
  static std::filesystem::path bundled_path();

  /// Throws NotFound for indices outside 0..12.
  TreatmentEntry const& treatment_for(int class_index) const;

 private:
  std::array<TreatmentEntry, kNumClasses> entries_;
};

}  // namespace paddy
