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

#include "paddy/cli/fixtures.hpp"

#include <fmt/format.h>

#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"

namespace paddy::cli {

using nlohmann::json;

inference::FixtureStore make_fixtures(std::filesystem::path const& images_dir, json const& spec) {
  if (!spec.is_object()) fail(ErrorCode::kInvalidInput, "fixture spec must map image names to outputs");
  inference::FixtureStore store;
  for (auto const& [name, entry] : spec.items()) {
    auto const where = fmt::format("fixture spec '{}'", name);
    if (!entry.is_object()) fail(ErrorCode::kInvalidInput, where + ": entry must be an object");
    for (auto const& [key, value] : entry.items()) {
      if (key != "probs" && key != "detections") {
        fail(ErrorCode::kInvalidInput, fmt::format("{}: unknown key '{}'", where, key));
      }
    }
    auto const path = images_dir / name;
    if (!std::filesystem::is_regular_file(path)) {
      fail(ErrorCode::kNotFound, fmt::format("{}: no image at {}", where, path.string()));
    }
    auto const digest = sha256_hex(read_file(path));
    try {
      if (auto it = entry.find("probs"); it != entry.end()) {
        store.set_classification(
            digest, inference::ClassificationResult::from_probs(it->get<std::vector<double>>()));
      }
      if (auto it = entry.find("detections"); it != entry.end()) {
        std::vector<inference::Detection> dets;
        for (auto const& d : *it) dets.push_back(inference::detection_from_json(d));
        store.set_detections(digest, std::move(dets));
      }
    } catch (json::exception const& e) {
      fail(ErrorCode::kInvalidInput, fmt::format("{}: {}", where, e.what()));
    } catch (Error const& e) {
      fail(e.code(), fmt::format("{}: {}", where, e.what()));
    }
  }
  return store;
}

}  // namespace paddy::cli
