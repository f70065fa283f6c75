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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace paddy {

/// Error categories shared by every module. Transport layers (HTTP, CLI)
/// map these onto their own status vocabulary.
enum class ErrorCode {
  kInvalidInput,
  kNotFound,
  kUnsupported,
  kFixtureMiss,
  kLeaseInvalid,
  kUnavailable,
  kConflict,
  kUnauthorized,
  kForbidden,
  kUnsupportedMedia,
  kPayloadTooLarge,
  kRefused,
  kIo,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view name);

/// Status used when the error crosses an HTTP boundary.
int http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string const& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, std::string const& message);

}  // namespace paddy
