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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace paddy::augment {

struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
  double ratio = 0.8;

  friend bool operator==(SplitManifest const&, SplitManifest const&) = default;
};

inline constexpr double kDefaultTrainRatio = 0.8;

/// Seeded Fisher-Yates shuffle of `items`, then the first round(ratio·N)
/// go to train. Throws InvalidInput for empty or duplicate items and for a
/// ratio outside (0, 1).
SplitManifest split_dataset(std::span<std::string const> items, double ratio,
                            std::uint64_t seed);

}  // namespace paddy::augment
