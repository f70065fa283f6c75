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

#include <filesystem>
#include <string>
#include <string_view>

#include "paddy/core/raster.hpp"

namespace paddy {

enum class ImageFormat { kUnknown, kPng, kJpeg };

/// Sniffs the magic number only.
ImageFormat sniff_format(std::string_view bytes);

/// Decodes PNG or JPEG into RGB. Throws UnsupportedMedia for anything else
/// or for corrupt data.
RasterImage decode_image(std::string_view bytes);

std::string encode_png(RasterImage const& image);
std::string encode_jpeg(RasterImage const& image, int quality = 95);

std::string read_file(std::filesystem::path const& path);
/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(std::filesystem::path const& path,
                       std::string_view bytes);

RasterImage load_image(std::filesystem::path const& path);

}  // namespace paddy
