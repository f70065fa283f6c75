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

#include <string>
#include <string_view>

namespace paddy::gateway {

inline constexpr int kDefaultPbkdf2Iterations = 100'000;

/// [a-z0-9_]{3,32}
bool valid_username(std::string_view name);
/// At least eight bytes.
bool valid_password(std::string_view password);

/// Salted PBKDF2-HMAC-SHA256, encoded as
/// "pbkdf2-sha256$<iterations>$<salt hex>$<hash hex>".
std::string hash_password(std::string_view password, int iterations = kDefaultPbkdf2Iterations);
/// Constant-time comparison against an encoded hash. Malformed encodings
/// never verify.
bool verify_password(std::string_view password, std::string_view encoded);

/// 32 random bytes as lowercase hex.
std::string new_token();
/// Tokens are stored only as this digest.
std::string token_digest(std::string_view token);
/// 16 random bytes as lowercase hex.
std::string new_id();

}  // namespace paddy::gateway
