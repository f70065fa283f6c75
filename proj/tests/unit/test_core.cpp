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

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "paddy/core/blob_store.hpp"
#include "paddy/core/digest.hpp"
#include "paddy/core/error.hpp"
#include "paddy/core/geometry.hpp"
#include "paddy/core/image_codec.hpp"
#include "paddy/core/raster.hpp"
#include "paddy/core/taxonomy.hpp"
#include "paddy/core/treatment.hpp"
#include "support/test_dirs.hpp"

namespace paddy {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (Error const& e) {
    return e.code();
  }
  FAIL("expected paddy::Error");
  return ErrorCode::kIo;
}

TEST_CASE("taxonomy indices follow lexicographic slug order") {
  auto classes = all_classes();
  REQUIRE(classes.size() == 13);
  std::vector<std::string> slugs;
  for (auto const& c : classes) slugs.emplace_back(c.slug);
  auto sorted = slugs;
  std::sort(sorted.begin(), sorted.end());
  CHECK(slugs == sorted);
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  for (int i = 0; i < kNumClasses; ++i) {
    CHECK(classes[static_cast<std::size_t>(i)].index == i);
  }
  CHECK(class_index("bacterial_leaf_blight") == 0);
  CHECK(class_index("normal") == kNormalIndex);
}

TEST_CASE("taxonomy round trip and unknown slugs") {
  for (auto const& c : all_classes()) {
    CHECK(index_to_slug(class_index(c.slug)) == c.slug);
  }
  CHECK(code_of([] { class_index("rice_smut"); }) == ErrorCode::kNotFound);
  CHECK(code_of([] { index_to_slug(13); }) == ErrorCode::kNotFound);
  CHECK(code_of([] { index_to_slug(-1); }) == ErrorCode::kNotFound);
}

TEST_CASE("pathogen kinds partition the twelve diseases") {
  CHECK(pathogen_kind(class_index("tungro")) == PathogenKind::kViral);
  CHECK(pathogen_kind(class_index("brown_spot")) == PathogenKind::kFungal);
  CHECK(pathogen_kind(class_index("normal")) == PathogenKind::kNone);
  CHECK(code_of([] { pathogen_kind(13); }) == ErrorCode::kNotFound);

  std::map<PathogenKind, std::vector<std::string>> groups;
  for (auto const& c : all_classes()) {
    groups[c.pathogen_kind].emplace_back(c.slug);
  }
  using V = std::vector<std::string>;
  CHECK(groups[PathogenKind::kFungal] == V{"blast", "brown_spot", "downy_mildew"});
  CHECK(groups[PathogenKind::kBacterial] ==
        V{"bacterial_leaf_blight", "bacterial_leaf_streak",
          "bacterial_panicle_blight"});
  CHECK(groups[PathogenKind::kViral] == V{"tungro"});
  CHECK(groups[PathogenKind::kPest] ==
        V{"black_stem_borer", "hispa", "leaf_roller", "white_stem_borer",
          "yellow_stem_borer"});
  CHECK(groups[PathogenKind::kNone] == V{"normal"});
}

TEST_CASE("detection indices skip normal and map back by slug") {
  CHECK(detection_slug(0) == "bacterial_leaf_blight");
  CHECK(detection_slug(8) == "leaf_roller");
  CHECK(detection_slug(9) == "tungro");
  CHECK(detection_slug(11) == "yellow_stem_borer");
  for (int d = 0; d < kNumDetectionClasses; ++d) {
    int const c = detection_to_class_index(d);
    CHECK(index_to_slug(c) == detection_slug(d));
    CHECK(class_to_detection_index(c) == d);
    CHECK(detection_index(detection_slug(d)) == d);
  }
  CHECK_FALSE(class_to_detection_index(kNormalIndex).has_value());
  CHECK(code_of([] { detection_index("normal"); }) == ErrorCode::kNotFound);
  CHECK(code_of([] { detection_slug(12); }) == ErrorCode::kNotFound);
}

TEST_CASE("bundled treatment knowledge base") {
  auto kb = TreatmentKb::load_bundled();
  for (int i = 0; i < kNumClasses; ++i) {
    auto const& entry = kb.treatment_for(i);
    CHECK(entry.class_index == i);
    CHECK_FALSE(entry.summary.empty());
    if (i == kNormalIndex) {
      CHECK(entry.actions.empty());
    } else {
      CHECK(entry.actions.size() >= 1);
    }
  }
  CHECK(code_of([&] { kb.treatment_for(13); }) == ErrorCode::kNotFound);
}

TEST_CASE("treatment knowledge base validation") {
  auto const full = read_file(TreatmentKb::bundled_path());
  CHECK_NOTHROW(TreatmentKb::parse(full));
  CHECK(code_of([] { TreatmentKb::parse("{}"); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([] { TreatmentKb::parse("[not json"); }) ==
        ErrorCode::kInvalidInput);
  CHECK(code_of([] {
          TreatmentKb::parse(R"([{"slug":"blast","summary":"x","actions":["a"]}])");
        }) == ErrorCode::kInvalidInput);

  auto doc = nlohmann::json::parse(full);
  SUBCASE("disease without actions") {
    for (auto& e : doc) {
      if (e["slug"] == "blast") e["actions"] = nlohmann::json::array();
    }
    CHECK(code_of([&] { TreatmentKb::parse(doc.dump()); }) ==
          ErrorCode::kInvalidInput);
  }
  SUBCASE("normal with actions") {
    for (auto& e : doc) {
      if (e["slug"] == "normal") e["actions"] = {"spray"};
    }
    CHECK(code_of([&] { TreatmentKb::parse(doc.dump()); }) ==
          ErrorCode::kInvalidInput);
  }
  SUBCASE("duplicate slug") {
    doc.push_back(doc[0]);
    CHECK(code_of([&] { TreatmentKb::parse(doc.dump()); }) ==
          ErrorCode::kInvalidInput);
  }
}

TEST_CASE("normalized box validity and clamping") {
  CHECK(NormalizedBox{0.5, 0.5, 0.2, 0.2}.valid());
  CHECK_FALSE(NormalizedBox{0.5, 0.5, 0.0, 0.2}.valid());
  CHECK_FALSE(NormalizedBox{1.1, 0.5, 0.1, 0.2}.valid());
  CHECK_FALSE(NormalizedBox{0.5, 0.5, 1.5, 0.2}.valid());

  // Clamping is a no-op on every valid box.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    NormalizedBox b{u(rng), u(rng), std::max(1e-6, u(rng)),
                    std::max(1e-6, u(rng))};
    REQUIRE(b.valid());
    CHECK(b.clamped() == b);
    CHECK(b.clamped().valid());
  }
  auto corners = NormalizedBox{0.2, 0.5, 0.1, 0.4}.corners();
  CHECK(corners.x1 == doctest::Approx(0.15));
  CHECK(corners.y2 == doctest::Approx(0.7));
}

TEST_CASE("geo point ranges") {
  CHECK(GeoPoint{27.7, 85.3}.valid());
  CHECK(GeoPoint{-90, 180}.valid());
  CHECK_FALSE(GeoPoint{90.5, 0}.valid());
  CHECK_FALSE(GeoPoint{0, -180.01}.valid());
  GeoRect r{0, 0, 10, 10};
  CHECK(r.contains({10, 10}));
  CHECK(r.contains({0, 5}));
  CHECK_FALSE(r.contains({10.0001, 5}));
}

TEST_CASE("raster invariants and crop") {
  CHECK(code_of([] { RasterImage(0, 4); }) == ErrorCode::kInvalidInput);
  CHECK(code_of([] { RasterImage(2, 2, std::vector<std::uint8_t>(11)); }) ==
        ErrorCode::kInvalidInput);
  RasterImage img(4, 3);
  img.at(2, 1, 0) = 200;
  auto c = crop(img, 1, 1, 2, 2);
  CHECK(c.width() == 2);
  CHECK(c.height() == 2);
  CHECK(c.at(1, 0, 0) == 200);
  auto clipped = crop(img, 3, 2, 10, 10);
  CHECK(clipped.width() == 1);
  CHECK(clipped.height() == 1);
  CHECK(raster_digest(img) != raster_digest(c));
  CHECK(raster_digest(img) == raster_digest(RasterImage(img)));
}

TEST_CASE("sha256 and base64") {
  CHECK(sha256_hex(std::string_view("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(is_sha256_hex(sha256_hex(std::string_view(""))));
  CHECK_FALSE(is_sha256_hex("ABC"));
  for (std::string const& s : std::vector<std::string>{
           "", "a", "ab", "abc", "abcd", std::string("\0\xff\x10", 3)}) {
    CHECK(base64_decode(base64_encode(s)) == s);
  }
  CHECK(code_of([] { base64_decode("abc"); }) == ErrorCode::kInvalidInput);
  CHECK(random_bytes(32).size() == 32);
}

TEST_CASE("png and jpeg codecs") {
  RasterImage img(5, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 5; ++x) {
      img.at(x, y, 0) = static_cast<std::uint8_t>(x * 40);
      img.at(x, y, 1) = static_cast<std::uint8_t>(y * 60);
      img.at(x, y, 2) = 17;
    }
  }
  auto png = encode_png(img);
  CHECK(sniff_format(png) == ImageFormat::kPng);
  CHECK(decode_image(png) == img);
  CHECK(encode_png(img) == png);

  auto jpeg = encode_jpeg(img);
  CHECK(sniff_format(jpeg) == ImageFormat::kJpeg);
  auto back = decode_image(jpeg);
  CHECK(back.width() == 5);
  CHECK(back.height() == 4);

  CHECK(code_of([] { decode_image("hello, world"); }) ==
        ErrorCode::kUnsupportedMedia);
  CHECK(code_of([&] { decode_image(png.substr(0, 20)); }) ==
        ErrorCode::kUnsupportedMedia);
}

TEST_CASE("blob store is content addressed") {
  test::TempDir dir;
  BlobStore store(dir.path() / "blobs");
  auto d1 = store.put("first");
  auto d2 = store.put("first");
  auto d3 = store.put("second");
  CHECK(d1 == d2);
  CHECK(d1 == sha256_hex(std::string_view("first")));
  CHECK(d1 != d3);
  CHECK(store.blob_count() == 2);
  CHECK(store.get(d1) == "first");
  CHECK(store.contains(d3));
  CHECK(code_of([&] { store.get(std::string(64, 'a')); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { store.get("../etc/passwd"); }) == ErrorCode::kInvalidInput);
}

}  // namespace
}  // namespace paddy
