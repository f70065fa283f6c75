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

#include "paddy/augment/split.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::augment {
namespace {

// Unbiased draw from [0, bound] by rejection; portable across standard
// libraries, unlike std::uniform_int_distribution.
std::uint64_t draw_upto(std::mt19937_64& gen, std::uint64_t bound) {
  std::uint64_t const range = bound + 1;
  std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
  for (;;) {
    std::uint64_t const v = gen();
    if (v < limit) return v % range;
  }
}

}  // namespace

SplitManifest split_dataset(std::span<std::string const> items, double ratio,
                            std::uint64_t seed) {
  if (items.empty()) fail(ErrorCode::kInvalidInput, "cannot split an empty item list");
  if (!(ratio > 0 && ratio < 1)) {
    fail(ErrorCode::kInvalidInput, fmt::format("split ratio {} outside (0, 1)", ratio));
  }
  std::unordered_set<std::string_view> seen;
  for (auto const& id : items) {
    if (!seen.insert(id).second) {
      fail(ErrorCode::kInvalidInput, fmt::format("duplicate item id '{}'", id));
    }
  }

  std::vector<std::string> order(items.begin(), items.end());
  std::mt19937_64 gen(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    auto const j = static_cast<std::size_t>(draw_upto(gen, i));
    std::swap(order[i], order[j]);
  }

  auto const n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(order.size())));
  SplitManifest m;
  m.seed = seed;
  m.ratio = ratio;
  m.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  m.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return m;
}

}  // namespace paddy::augment
