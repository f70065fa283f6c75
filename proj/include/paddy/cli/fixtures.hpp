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

#include "json.hpp"
#include "paddy/inference/fixture.hpp"

namespace paddy::cli {

/// Builds a fixture store from a spec keyed by image file name:
///   {"leaf.png": {"probs": [13 numbers], "detections": [{"class", "conf", "box"}]}}
/// Either part may be omitted. Images are read from `images_dir` and keyed
/// by the SHA-256 of their bytes.
inference::FixtureStore make_fixtures(std::filesystem::path const& images_dir,
                                      nlohmann::json const& spec);

}  // namespace paddy::cli
