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

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "paddy/inference/types.hpp"

namespace paddy::inference {

/// A model behind a uniform interface. Instances are single-owner: one
/// request at a time.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual BackendInfo const& info() const = 0;
  /// Default implementations throw Unsupported.
  virtual ClassificationResult classify(ImageInput const& image);
  /// Unfiltered detector output.
  virtual std::vector<Detection> detect_raw(ImageInput const& image);
};

using BackendFactory = std::function<std::unique_ptr<ModelBackend>()>;

class FixtureStore;

struct BackendSpec {
  /// "fixture" or "heuristic".
  std::string kind = "fixture";
  std::string backend_id;
  std::string version = "1";
  bool classify = true;
  bool detect = true;
  int input_side = 384;
  /// Fixture backends: a shared store, or a file to load one from.
  std::shared_ptr<FixtureStore const> fixtures;
  std::filesystem::path fixture_path;
  /// Artificial per-call latency.
  std::chrono::milliseconds latency{0};
};

/// Throws InvalidInput for an unknown kind or missing fixtures.
std::unique_ptr<ModelBackend> make_backend(BackendSpec const& spec);

/// Loads fixtures at most once and returns a factory for fresh instances.
BackendFactory backend_factory(BackendSpec spec);

}  // namespace paddy::inference
