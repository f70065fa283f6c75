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
#include <cstddef>
#include <vector>

#include "paddy/core/raster.hpp"

namespace paddy::augment {

inline constexpr std::array<double, 3> kImageNetMean{0.485, 0.456, 0.406};
inline constexpr std::array<double, 3> kImageNetStd{0.229, 0.224, 0.225};
inline constexpr std::array<int, 3> kInputSides{256, 384, 640};

/// Planar CHW float buffer.
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
                 static_cast<std::size_t>(y)) *
                    static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
};

/// Bilinear resize with half-pixel centres and edge clamping. A same-size
/// resize reproduces the input exactly.
RasterImage resize_bilinear(RasterImage const& image, int width, int height);

/// Resizes to a target_side square and converts to CHW floats in [0, 1],
/// optionally normalized per channel as (x/255 − mean)/std. Throws
/// InvalidInput unless target_side is one of kInputSides.
Tensor preprocess(RasterImage const& image, int target_side, bool normalize);

}  // namespace paddy::augment
