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

#include "paddy/inference/fixture.hpp"

#include <thread>

#include <fmt/format.h>

#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::inference {
namespace {

using nlohmann::json;

void require_digest(std::string const& digest) {
  if (!is_sha256_hex(digest)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("fixture key '{}' is not a lowercase SHA-256 digest", digest));
  }
}

template <typename Map>
auto const& lookup(Map const& map, ImageInput const& image, char const* what) {
  if (auto it = map.find(image.digest); it != map.end()) return it->second;
  if (image.parent_digest) {
    if (auto it = map.find(*image.parent_digest); it != map.end()) return it->second;
  }
  fail(ErrorCode::kFixtureMiss,
       fmt::format("no {} fixture for image {}", what, image.digest));
}

}  // namespace

FixtureStore FixtureStore::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("fixture store is not JSON: {}", e.what()));
  }
  if (!doc.is_object()) fail(ErrorCode::kInvalidInput, "fixture store must be an object");
  for (auto const& [key, _] : doc.items()) {
    if (key != "classification" && key != "detection") {
      fail(ErrorCode::kInvalidInput, fmt::format("unknown fixture section '{}'", key));
    }
  }
  FixtureStore store;
  if (auto it = doc.find("classification"); it != doc.end()) {
    if (!it->is_object()) fail(ErrorCode::kInvalidInput, "classification must be an object");
    for (auto const& [digest, entry] : it->items()) {
      store.set_classification(digest, classification_from_json(entry));
    }
  }
  if (auto it = doc.find("detection"); it != doc.end()) {
    if (!it->is_object()) fail(ErrorCode::kInvalidInput, "detection must be an object");
    for (auto const& [digest, entry] : it->items()) {
      if (!entry.is_array()) {
        fail(ErrorCode::kInvalidInput,
             fmt::format("detections for {} must be an array", digest));
      }
      std::vector<Detection> dets;
      for (auto const& d : entry) {
        auto det = detection_from_json(d);
        det.status = DetectionStatus::kRaw;
        dets.push_back(det);
      }
      store.set_detections(digest, std::move(dets));
    }
  }
  return store;
}

FixtureStore FixtureStore::load(std::filesystem::path const& path) {
  return parse(read_file(path));
}

std::string FixtureStore::dump() const {
  json cls = json::object();
  for (auto const& [digest, r] : classification_) cls[digest] = {{"probs", r.probs}};
  json det = json::object();
  for (auto const& [digest, dets] : detection_) {
    json arr = json::array();
    for (auto const& d : dets) {
      arr.push_back({{"class", detection_slug(d.class_index)},
                     {"conf", d.confidence},
                     {"box", {d.box.cx, d.box.cy, d.box.w, d.box.h}}});
    }
    det[digest] = std::move(arr);
  }
  return json{{"classification", cls}, {"detection", det}}.dump(2) + "\n";
}

void FixtureStore::save(std::filesystem::path const& path) const {
  write_file_atomic(path, dump());
}

void FixtureStore::set_classification(std::string const& digest,
                                      ClassificationResult r) {
  require_digest(digest);
  classification_[digest] = ClassificationResult::from_probs(std::move(r.probs));
}

void FixtureStore::set_detections(std::string const& digest,
                                  std::vector<Detection> dets) {
  require_digest(digest);
  for (auto& d : dets) {
    d.validate();
    d.status = DetectionStatus::kRaw;
  }
  detection_[digest] = std::move(dets);
}

ClassificationResult const& FixtureStore::classification(ImageInput const& image) const {
  return lookup(classification_, image, "classification");
}

std::vector<Detection> const& FixtureStore::detections(ImageInput const& image) const {
  return lookup(detection_, image, "detection");
}

FixtureBackend::FixtureBackend(BackendInfo info,
                               std::shared_ptr<FixtureStore const> store,
                               std::chrono::milliseconds latency)
    : info_(std::move(info)), store_(std::move(store)), latency_(latency) {
  if (!store_) fail(ErrorCode::kInvalidInput, "fixture backend needs a store");
}

ClassificationResult FixtureBackend::classify(ImageInput const& image) {
  if (!info_.can_classify) return ModelBackend::classify(image);
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  return store_->classification(image);
}

std::vector<Detection> FixtureBackend::detect_raw(ImageInput const& image) {
  if (!info_.can_detect) return ModelBackend::detect_raw(image);
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  return store_->detections(image);
}

}  // namespace paddy::inference
