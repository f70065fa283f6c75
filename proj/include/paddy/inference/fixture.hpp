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
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "paddy/inference/backend.hpp"

namespace paddy::inference {

/// Canned outputs keyed by image digest. File format:
///
///   {"classification": {"<digest>": {"probs": [13 numbers]}},
///    "detection": {"<digest>": [{"class": slug, "conf": c,
///                                "box": [cx, cy, w, h]}]}}
class FixtureStore {
 public:
  static FixtureStore parse(std::string_view text);
  static FixtureStore load(std::filesystem::path const& path);
  std::string dump() const;
  void save(std::filesystem::path const& path) const;

  void set_classification(std::string const& digest, ClassificationResult r);
  void set_detections(std::string const& digest, std::vector<Detection> dets);

  /// Looks up `digest`, then `parent_digest`. Throws FixtureMiss.
  ClassificationResult const& classification(ImageInput const& image) const;
  std::vector<Detection> const& detections(ImageInput const& image) const;

  std::size_t classification_count() const { return classification_.size(); }
  std::size_t detection_count() const { return detection_.size(); }

 private:
  std::map<std::string, ClassificationResult> classification_;
  std::map<std::string, std::vector<Detection>> detection_;
};

class FixtureBackend final : public ModelBackend {
 public:
  FixtureBackend(BackendInfo info, std::shared_ptr<FixtureStore const> store,
                 std::chrono::milliseconds latency = {});

  BackendInfo const& info() const override { return info_; }
  ClassificationResult classify(ImageInput const& image) override;
  std::vector<Detection> detect_raw(ImageInput const& image) override;

 private:
  BackendInfo info_;
  std::shared_ptr<FixtureStore const> store_;
  std::chrono::milliseconds latency_;
};

/// Colour-statistics stand-in that runs on arbitrary images. Lesion-like
/// pixels (saturated non-green hues, dark necrosis, pale streaks) drive
/// both the class scores and blob detections. It has no accuracy claim.
class HeuristicBackend final : public ModelBackend {
 public:
  explicit HeuristicBackend(BackendInfo info);

  BackendInfo const& info() const override { return info_; }
  ClassificationResult classify(ImageInput const& image) override;
  std::vector<Detection> detect_raw(ImageInput const& image) override;

 private:
  BackendInfo info_;
};

}  // namespace paddy::inference
