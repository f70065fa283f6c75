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

#include "paddy/augment/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy::augment {
namespace {

struct Tap {
  int i0;
  int i1;
  double frac;
};

// Source taps for each destination index along one axis.
std::vector<Tap> axis_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  double const scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    int const i0 = static_cast<int>(std::floor(s));
    int const i1 = std::min(i0 + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {i0, i1, s - i0};
  }
  return taps;
}

template <typename Sink>
void resample(RasterImage const& image, int width, int height, Sink&& sink) {
  if (image.empty()) fail(ErrorCode::kInvalidInput, "empty image");
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidInput, "target dimensions must be positive");
  }
  auto const xs = axis_taps(image.width(), width);
  auto const ys = axis_taps(image.height(), height);
  for (int y = 0; y < height; ++y) {
    Tap const ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      Tap const tx = xs[static_cast<std::size_t>(x)];
      for (int c = 0; c < RasterImage::kChannels; ++c) {
        double const top = (1 - tx.frac) * image.at(tx.i0, ty.i0, c) +
                           tx.frac * image.at(tx.i1, ty.i0, c);
        double const bottom = (1 - tx.frac) * image.at(tx.i0, ty.i1, c) +
                              tx.frac * image.at(tx.i1, ty.i1, c);
        sink(x, y, c, (1 - ty.frac) * top + ty.frac * bottom);
      }
    }
  }
}

}  // namespace

RasterImage resize_bilinear(RasterImage const& image, int width, int height) {
  RasterImage out(width, height);
  resample(image, width, height, [&](int x, int y, int c, double v) {
    out.at(x, y, c) =
        static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0, 255.0));
  });
  return out;
}

Tensor preprocess(RasterImage const& image, int target_side, bool normalize) {
  if (std::find(kInputSides.begin(), kInputSides.end(), target_side) ==
      kInputSides.end()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("input side {} not one of 256, 384, 640", target_side));
  }
  Tensor t;
  t.channels = RasterImage::kChannels;
  t.height = target_side;
  t.width = target_side;
  auto const plane = static_cast<std::size_t>(target_side) *
                     static_cast<std::size_t>(target_side);
  t.data.resize(plane * RasterImage::kChannels);
  resample(image, target_side, target_side, [&](int x, int y, int c, double v) {
    double value = v / 255.0;
    if (normalize) {
      value = (value - kImageNetMean[static_cast<std::size_t>(c)]) /
              kImageNetStd[static_cast<std::size_t>(c)];
    }
    t.data[static_cast<std::size_t>(c) * plane +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(target_side) +
           static_cast<std::size_t>(x)] = static_cast<float>(value);
  });
  return t;
}

}  // namespace paddy::augment
