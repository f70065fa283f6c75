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
#include <string_view>
#include <vector>

namespace paddy {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<std::uint8_t const> bytes);
std::string sha256_hex(std::string_view bytes);

bool is_sha256_hex(std::string_view digest);

/// Bytes from the OS CSPRNG.
std::vector<std::uint8_t> random_bytes(std::size_t count);

std::string to_hex(std::span<std::uint8_t const> bytes);

std::string base64_encode(std::string_view bytes);
/// Throws InvalidInput on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace paddy
