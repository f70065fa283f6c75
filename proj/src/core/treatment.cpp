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

#include "paddy/core/treatment.hpp"

#include <cstdlib>

#include "json.hpp"

#include "paddy/core/error.hpp"
#include "paddy/core/image_codec.hpp"

#ifndef PADDY_DATA_DIR
#define PADDY_DATA_DIR "data"
#endif

namespace paddy {

TreatmentKb TreatmentKb::parse(std::string_view json_text) {
  auto bad = [](std::string const& why) {
    fail(ErrorCode::kInvalidInput, "treatment knowledge base: " + why);
  };
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (nlohmann::json::parse_error const& e) {
    bad(e.what());
  }
  if (!doc.is_array()) bad("top level must be an array");

  TreatmentKb kb;
  std::array<bool, kNumClasses> seen{};
  for (auto const& item : doc) {
    if (!item.is_object() || !item.contains("slug") ||
        !item["slug"].is_string()) {
      bad("every entry needs a string `slug`");
    }
    auto const slug = item["slug"].get<std::string>();
    int index = 0;
    try {
      index = class_index(slug);
    } catch (Error const&) {
      bad("unknown slug `" + slug + "`");
    }
    if (seen[static_cast<std::size_t>(index)]) bad("duplicate slug `" + slug + "`");
    seen[static_cast<std::size_t>(index)] = true;

    TreatmentEntry entry;
    entry.class_index = index;
    entry.summary = item.value("summary", std::string{});
    if (auto it = item.find("actions"); it != item.end()) {
      if (!it->is_array()) bad("`actions` must be an array for " + slug);
      for (auto const& a : *it) {
        if (!a.is_string()) bad("non-string action for " + slug);
        entry.actions.push_back(a.get<std::string>());
      }
    }
    if (index == kNormalIndex && !entry.actions.empty()) {
      bad("`normal` must not carry actions");
    }
    if (index != kNormalIndex && entry.actions.empty()) {
      bad("`" + slug + "` needs at least one action");
    }
    kb.entries_[static_cast<std::size_t>(index)] = std::move(entry);
  }
  for (int i = 0; i < kNumClasses; ++i) {
    if (!seen[static_cast<std::size_t>(i)]) {
      bad("missing entry for `" + std::string(index_to_slug(i)) + "`");
    }
  }
  return kb;
}

TreatmentKb TreatmentKb::load(std::filesystem::path const& path) {
  return parse(read_file(path));
}

std::filesystem::path TreatmentKb::bundled_path() {
  if (char const* env = std::getenv("PADDY_TREATMENTS"); env && *env) {
    return env;
  }
  return std::filesystem::path(PADDY_DATA_DIR) / "treatments.json";
}

TreatmentKb TreatmentKb::load_bundled() { return load(bundled_path()); }

TreatmentEntry const& TreatmentKb::treatment_for(int class_index) const {
  disease_class(class_index);
  return entries_[static_cast<std::size_t>(class_index)];
}

}  // namespace paddy
