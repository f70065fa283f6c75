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

#include "paddy/cli/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <fmt/format.h>

#include "paddy/augment/annotation_io.hpp"
#include "paddy/augment/manifest.hpp"
#include "paddy/augment/split.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_image_file(fs::directory_entry const& e) {
  if (!e.is_regular_file()) return false;
  auto ext = e.path().extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png";
}

std::optional<int> slug_index(std::string const& name) {
  try {
    return class_index(name);
  } catch (Error const&) {
    return std::nullopt;
  }
}

fs::path resolve(fs::path const& base, std::string const& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

augment::Range range_from(json const& j, char const* key, augment::Range fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_array() || it->size() != 2) {
    fail(ErrorCode::kInvalidInput, fmt::format("'{}' must be a [lo, hi] pair", key));
  }
  return {it->at(0).get<double>(), it->at(1).get<double>()};
}

}  // namespace

DatasetStats dataset_stats(fs::path const& dataset_dir) {
  if (!fs::is_directory(dataset_dir)) {
    fail(ErrorCode::kNotFound, fmt::format("{} is not a directory", dataset_dir.string()));
  }
  std::map<int, std::size_t> known;
  std::map<std::string, std::size_t> unknown;
  for (auto const& entry : fs::directory_iterator(dataset_dir)) {
    if (!entry.is_directory()) continue;
    std::size_t n = 0;
    for (auto const& f : fs::directory_iterator(entry.path())) n += is_image_file(f) ? 1 : 0;
    auto const name = entry.path().filename().string();
    if (auto idx = slug_index(name)) {
      known[*idx] = n;
    } else {
      unknown[name] = n;
    }
  }
  DatasetStats stats;
  for (auto const& [idx, n] : known) {
    stats.classes.push_back({std::string(index_to_slug(idx)), n});
    stats.total += n;
  }
  for (auto const& [name, n] : unknown) stats.unrecognized.push_back({name, n});
  return stats;
}

std::string render_text(DatasetStats const& stats) {
  std::size_t width = 5;
  for (auto const& c : stats.classes) width = std::max(width, c.name.size());
  std::string out = fmt::format("{:<{}}  {:>7}\n", "class", width, "images");
  for (auto const& c : stats.classes) out += fmt::format("{:<{}}  {:>7}\n", c.name, width, c.images);
  out += fmt::format("{:<{}}  {:>7}\n", "total", width, stats.total);
  for (auto const& u : stats.unrecognized) {
    out += fmt::format("warning: unrecognized directory '{}' ({} images)\n", u.name, u.images);
  }
  return out;
}

json to_json(DatasetStats const& stats) {
  json classes = json::array();
  for (auto const& c : stats.classes) classes.push_back({{"class", c.name}, {"images", c.images}});
  json unknown = json::array();
  for (auto const& u : stats.unrecognized) unknown.push_back({{"directory", u.name}, {"images", u.images}});
  return {{"classes", classes}, {"total", stats.total}, {"unrecognized", unknown}};
}

SplitSummary split_manifest(fs::path const& manifest, double ratio, std::uint64_t seed,
                            fs::path const& out) {
  auto m = augment::DatasetManifest::load(manifest);
  if (std::any_of(m.rows.begin(), m.rows.end(), [](auto const& r) { return !r.source_id.empty(); })) {
    fail(ErrorCode::kRefused, "manifest already contains augmented items; split the originals");
  }
  auto const ids = m.ids();
  auto const split = augment::split_dataset(ids, ratio, seed);
  std::set<std::string> const train(split.train.begin(), split.train.end());
  for (auto& r : m.rows) r.split = train.contains(r.id) ? "train" : "test";
  SplitSummary s{split.train.size(), split.test.size(), out.empty() ? manifest : out};
  m.save(s.written);
  return s;
}

augment::AugmentConfig parse_augment_config(json const& doc) {
  if (!doc.is_object()) fail(ErrorCode::kInvalidInput, "augmentation config must be an object");
  static const std::set<std::string> kKeys{"rotation_deg", "brightness", "shear_x_deg",
                                           "hflip_probability", "vflip_probability",
                                           "min_visibility"};
  for (auto const& [k, v] : doc.items()) {
    if (!kKeys.contains(k)) fail(ErrorCode::kInvalidInput, fmt::format("unknown augmentation key '{}'", k));
  }
  augment::AugmentConfig c;
  try {
    c.rotation_deg = range_from(doc, "rotation_deg", c.rotation_deg);
    c.brightness = range_from(doc, "brightness", c.brightness);
    c.shear_x_deg = range_from(doc, "shear_x_deg", c.shear_x_deg);
    c.hflip_probability = doc.value("hflip_probability", c.hflip_probability);
    c.vflip_probability = doc.value("vflip_probability", c.vflip_probability);
    c.min_visibility = doc.value("min_visibility", c.min_visibility);
  } catch (json::exception const& e) {
    fail(ErrorCode::kInvalidInput, fmt::format("augmentation config: {}", e.what()));
  }
  c.validate();
  return c;
}

AugmentSummary augment_manifest(fs::path const& manifest, augment::AugmentConfig const& config,
                                int multiplier, fs::path const& out_dir) {
  if (multiplier < 1) fail(ErrorCode::kInvalidInput, "multiplier must be at least 1");
  config.validate();
  auto m = augment::DatasetManifest::load(manifest);
  if (!m.is_split()) {
    fail(ErrorCode::kRefused, "dataset must be split into train and test before augmenting");
  }
  auto const base = manifest.parent_path();
  fs::create_directories(out_dir / "images");
  auto const out_abs = fs::absolute(out_dir);

  augment::DatasetManifest result;
  std::set<std::string> ids;
  for (auto const& r : m.rows) {
    auto copy = r;
    copy.path = fs::proximate(fs::absolute(resolve(base, r.path)), out_abs).generic_string();
    result.rows.push_back(copy);
    ids.insert(r.id);
  }

  AugmentSummary summary;
  std::uint64_t ordinal = 0;
  for (auto const& r : m.rows) {
    if (r.split != "train" || !r.source_id.empty()) continue;
    ++summary.train_sources;
    auto const image_path = resolve(base, r.path);
    augment::AnnotatedImage source{load_image(image_path), {}};
    auto const ann = augment::annotation_path_for(image_path);
    bool const annotated = fs::exists(ann);
    if (annotated) source.boxes = augment::read_annotations(ann);

    for (int k = 0; k < multiplier; ++k, ++ordinal) {
      auto const spec = augment::random_transform(config, ordinal);
      auto const variant = augment::apply_transform(source, spec, config.min_visibility);
      std::string const id = fmt::format("{}_aug{}", r.id, k);
      if (!ids.insert(id).second) fail(ErrorCode::kConflict, fmt::format("id '{}' already exists", id));
      auto const rel = fs::path("images") / (id + ".png");
      write_file_atomic(out_dir / rel, encode_png(variant.image));
      if (annotated) {
        augment::write_annotations(out_dir / "images" / (id + ".txt"), variant.boxes);
        summary.boxes_kept += variant.boxes.size();
        summary.boxes_dropped += source.boxes.size() - variant.boxes.size();
      }
      result.rows.push_back({id, rel.generic_string(), "train", r.class_slug, r.id});
      ++summary.generated;
    }
  }
  summary.manifest = out_dir / "manifest.csv";
  result.save(summary.manifest);
  return summary;
}

}  // namespace paddy::cli
