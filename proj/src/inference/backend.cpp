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

#include "paddy/inference/backend.hpp"

#include <fmt/format.h>

#include "paddy/core/error.hpp"
#include "paddy/inference/fixture.hpp"

namespace paddy::inference {

ClassificationResult ModelBackend::classify(ImageInput const&) {
  fail(ErrorCode::kUnsupported,
       fmt::format("backend '{}' cannot classify", info().backend_id));
}

std::vector<Detection> ModelBackend::detect_raw(ImageInput const&) {
  fail(ErrorCode::kUnsupported,
       fmt::format("backend '{}' cannot detect", info().backend_id));
}

std::unique_ptr<ModelBackend> make_backend(BackendSpec const& spec) {
  BackendInfo info{spec.backend_id.empty() ? spec.kind : spec.backend_id,
                   spec.version, spec.classify, spec.detect, spec.input_side};
  if (info.input_side <= 0) fail(ErrorCode::kInvalidInput, "input side must be positive");
  if (spec.kind == "fixture") {
    auto store = spec.fixtures;
    if (!store) {
      if (spec.fixture_path.empty()) {
        fail(ErrorCode::kInvalidInput, "fixture backend needs a fixture store");
      }
      store = std::make_shared<FixtureStore const>(FixtureStore::load(spec.fixture_path));
    }
    return std::make_unique<FixtureBackend>(std::move(info), std::move(store),
                                            spec.latency);
  }
  if (spec.kind == "heuristic") return std::make_unique<HeuristicBackend>(std::move(info));
  fail(ErrorCode::kInvalidInput, fmt::format("unknown backend kind '{}'", spec.kind));
}

BackendFactory backend_factory(BackendSpec spec) {
  if (spec.kind == "fixture" && !spec.fixtures) {
    if (spec.fixture_path.empty()) {
      fail(ErrorCode::kInvalidInput, "fixture backend needs a fixture store");
    }
    spec.fixtures =
        std::make_shared<FixtureStore const>(FixtureStore::load(spec.fixture_path));
  }
  make_backend(spec);
  return [spec] { return make_backend(spec); };
}

}  // namespace paddy::inference
