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

#include "paddy/core/raster.hpp"

#include <algorithm>
#include <cstring>

#include <fmt/format.h>

#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"

namespace paddy {
namespace {

std::size_t buffer_size(int width, int height) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("raster dimensions must be positive, got {}x{}", width,
                     height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         RasterImage::kChannels;
}

}  // namespace

RasterImage::RasterImage(int width, int height)
    : width_(width), height_(height), pixels_(buffer_size(width, height), 0) {}

RasterImage::RasterImage(int width, int height,
                         std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != buffer_size(width, height)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("raster buffer holds {} bytes, expected {}",
                     pixels_.size(), buffer_size(width, height)));
  }
}

RasterImage crop(RasterImage const& image, int x, int y, int width,
                 int height) {
  int const x0 = std::clamp(x, 0, image.width() - 1);
  int const y0 = std::clamp(y, 0, image.height() - 1);
  int const x1 = std::clamp(x + width, x0 + 1, image.width());
  int const y1 = std::clamp(y + height, y0 + 1, image.height());
  RasterImage out(x1 - x0, y1 - y0);
  auto const row_bytes =
      static_cast<std::size_t>(out.width()) * RasterImage::kChannels;
  auto src = image.pixels();
  auto dst = out.pixels();
  for (int row = 0; row < out.height(); ++row) {
    auto const src_off = (static_cast<std::size_t>(y0 + row) *
                              static_cast<std::size_t>(image.width()) +
                          static_cast<std::size_t>(x0)) *
                         RasterImage::kChannels;
    std::memcpy(dst.data() + static_cast<std::size_t>(row) * row_bytes,
                src.data() + src_off, row_bytes);
  }
  return out;
}

std::string raster_digest(RasterImage const& image) {
  auto header = fmt::format("P6\n{} {}\n255\n", image.width(), image.height());
  std::string buf = header;
  auto px = image.pixels();
  buf.append(reinterpret_cast<char const*>(px.data()), px.size());
  return sha256_hex(buf);
}

}  // namespace paddy
