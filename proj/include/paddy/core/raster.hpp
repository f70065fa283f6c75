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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace paddy {

/// Row-major, interleaved RGB, 8 bits per channel.
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;
  /// Black image. Throws InvalidInput for non-positive dimensions.
  RasterImage(int width, int height);
  /// Throws InvalidInput unless pixels.size() == width * height * 3.
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y, int c) const {
    return pixels_[offset(x, y) + static_cast<std::size_t>(c)];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels_[offset(x, y) + static_cast<std::size_t>(c)];
  }

  std::span<std::uint8_t const> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(RasterImage const&, RasterImage const&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
           kChannels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Copies the pixel rectangle [x, x+width) × [y, y+height) after clipping
/// it to the frame. The result is at least 1×1.
RasterImage crop(RasterImage const& image, int x, int y, int width, int height);

/// SHA-256 over a binary PPM serialization of the image. Identifies rasters
/// that never existed as encoded files (crops, resized inputs).
std::string raster_digest(RasterImage const& image);

}  // namespace paddy
