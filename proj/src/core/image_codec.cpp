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

#include "paddy/core/image_codec.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "paddy/core/error.hpp"

namespace paddy {
namespace {

cv::Mat to_bgr_mat(RasterImage const& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  auto px = image.pixels();
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<std::uint8_t>(y);
    auto const* src = px.data() + static_cast<std::size_t>(y) *
                                      static_cast<std::size_t>(image.width()) *
                                      3;
    for (int x = 0; x < image.width(); ++x) {
      row[3 * x + 0] = src[3 * x + 2];
      row[3 * x + 1] = src[3 * x + 1];
      row[3 * x + 2] = src[3 * x + 0];
    }
  }
  return bgr;
}

std::string encode(RasterImage const& image, char const* ext,
                   std::vector<int> const& params) {
  if (image.empty()) fail(ErrorCode::kInvalidInput, "cannot encode empty image");
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(ext, to_bgr_mat(image), buf, params)) {
    fail(ErrorCode::kIo, std::string("image encoding failed for ") + ext);
  }
  return {buf.begin(), buf.end()};
}

}  // namespace

ImageFormat sniff_format(std::string_view bytes) {
  static constexpr unsigned char kPng[] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a,
                                           0x1a, 0x0a};
  if (bytes.size() >= sizeof(kPng) &&
      std::memcmp(bytes.data(), kPng, sizeof(kPng)) == 0) {
    return ImageFormat::kPng;
  }
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xff &&
      static_cast<unsigned char>(bytes[1]) == 0xd8 &&
      static_cast<unsigned char>(bytes[2]) == 0xff) {
    return ImageFormat::kJpeg;
  }
  return ImageFormat::kUnknown;
}

RasterImage decode_image(std::string_view bytes) {
  if (sniff_format(bytes) == ImageFormat::kUnknown) {
    fail(ErrorCode::kUnsupportedMedia, "not a PNG or JPEG image");
  }
  cv::Mat const raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<char*>(bytes.data()));
  cv::Mat bgr;
  try {
    bgr = cv::imdecode(raw, cv::IMREAD_COLOR);
  } catch (cv::Exception const& e) {
    fail(ErrorCode::kUnsupportedMedia, std::string("image decode failed: ") +
                                           e.what());
  }
  if (bgr.empty()) fail(ErrorCode::kUnsupportedMedia, "image decode failed");
  RasterImage out(bgr.cols, bgr.rows);
  auto px = out.pixels();
  for (int y = 0; y < bgr.rows; ++y) {
    auto const* row = bgr.ptr<std::uint8_t>(y);
    auto* dst = px.data() + static_cast<std::size_t>(y) *
                                static_cast<std::size_t>(bgr.cols) * 3;
    for (int x = 0; x < bgr.cols; ++x) {
      dst[3 * x + 0] = row[3 * x + 2];
      dst[3 * x + 1] = row[3 * x + 1];
      dst[3 * x + 2] = row[3 * x + 0];
    }
  }
  return out;
}

std::string encode_png(RasterImage const& image) {
  return encode(image, ".png", {cv::IMWRITE_PNG_COMPRESSION, 6});
}

std::string encode_jpeg(RasterImage const& image, int quality) {
  return encode(image, ".jpg", {cv::IMWRITE_JPEG_QUALITY, quality});
}

std::string read_file(std::filesystem::path const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(std::filesystem::path const& path,
                       std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  auto tmp = path;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RasterImage load_image(std::filesystem::path const& path) {
  return decode_image(read_file(path));
}

}  // namespace paddy
