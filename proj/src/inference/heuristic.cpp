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
#include <array>
#include <cmath>

#include "paddy/core/error.hpp"
#include "paddy/core/taxonomy.hpp"
#include "paddy/inference/fixture.hpp"

namespace paddy::inference {
namespace {

enum Tone { kGreen, kYellow, kBrown, kDark, kPale, kRed, kOther, kToneCount };

Tone tone_of(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  double const r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  double const mx = std::max({r, g, b}), mn = std::min({r, g, b});
  double const v = mx, s = mx > 0 ? (mx - mn) / mx : 0;
  if (v < 0.2) return kDark;
  if (s < 0.15) return v > 0.75 ? kPale : kOther;
  double h = 0;
  double const d = mx - mn;
  if (mx == r) {
    h = 60 * std::fmod((g - b) / d, 6.0);
  } else if (mx == g) {
    h = 60 * ((b - r) / d + 2);
  } else {
    h = 60 * ((r - g) / d + 4);
  }
  if (h < 0) h += 360;
  if (s < 0.3) return kOther;
  if (h < 12 || h >= 330) return kRed;
  if (h < 40) return kBrown;
  if (h < 65) return kYellow;
  if (h < 180) return kGreen;
  return kOther;
}

std::array<double, kToneCount> tone_shares(RasterImage const& img) {
  std::array<double, kToneCount> counts{};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      counts[tone_of(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2))] += 1;
    }
  }
  double const n = static_cast<double>(img.width()) * img.height();
  for (auto& c : counts) c /= n;
  return counts;
}

int detection_class_for(Tone t) {
  switch (t) {
    case kYellow: return detection_index("tungro");
    case kBrown: return detection_index("brown_spot");
    case kDark: return detection_index("black_stem_borer");
    case kPale: return detection_index("hispa");
    case kRed: return detection_index("bacterial_leaf_streak");
    default: return detection_index("blast");
  }
}

bool lesion(Tone t) { return t != kGreen && t != kOther; }

}  // namespace

HeuristicBackend::HeuristicBackend(BackendInfo info) : info_(std::move(info)) {}

ClassificationResult HeuristicBackend::classify(ImageInput const& image) {
  if (!info_.can_classify) return ModelBackend::classify(image);
  if (image.raster.empty()) fail(ErrorCode::kInvalidInput, "empty image");
  auto const s = tone_shares(image.raster);
  std::vector<double> logits(kNumClasses, 0.0);
  auto add = [&](char const* slug, double v) {
    logits[static_cast<std::size_t>(class_index(slug))] += v;
  };
  add("normal", 6 * s[kGreen] + 2 * s[kOther]);
  add("tungro", 6 * s[kYellow]);
  add("bacterial_leaf_blight", 4 * s[kYellow] + 2 * s[kPale]);
  add("bacterial_leaf_streak", 6 * s[kRed]);
  add("bacterial_panicle_blight", 3 * s[kPale] + 2 * s[kBrown]);
  add("brown_spot", 6 * s[kBrown]);
  add("blast", 3 * s[kBrown] + 3 * s[kPale]);
  add("downy_mildew", 4 * s[kPale] + 1 * s[kYellow]);
  add("hispa", 5 * s[kPale]);
  add("leaf_roller", 3 * s[kPale] + 2 * s[kGreen]);
  add("black_stem_borer", 5 * s[kDark]);
  add("yellow_stem_borer", 3 * s[kYellow] + 2 * s[kDark]);
  add("white_stem_borer", 3 * s[kPale] + 2 * s[kDark]);

  double const mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0;
  for (auto& l : logits) sum += (l = std::exp(l - mx));
  for (auto& l : logits) l /= sum;
  return ClassificationResult::from_probs(std::move(logits));
}

std::vector<Detection> HeuristicBackend::detect_raw(ImageInput const& image) {
  if (!info_.can_detect) return ModelBackend::detect_raw(image);
  auto const& img = image.raster;
  if (img.empty()) fail(ErrorCode::kInvalidInput, "empty image");

  int const cell = std::max(1, std::min(img.width(), img.height()) / 32);
  int const gw = (img.width() + cell - 1) / cell;
  int const gh = (img.height() + cell - 1) / cell;
  std::vector<double> share(static_cast<std::size_t>(gw * gh), 0.0);
  std::vector<std::array<int, kToneCount>> tones(share.size());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      Tone const t = tone_of(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      auto const k = static_cast<std::size_t>((y / cell) * gw + x / cell);
      tones[k][t] += 1;
      if (lesion(t)) share[k] += 1;
    }
  }
  for (std::size_t k = 0; k < share.size(); ++k) share[k] /= cell * cell;

  std::vector<int> label(share.size(), -1);
  std::vector<Detection> out;
  for (int start = 0; start < gw * gh && out.size() < 50; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0 ||
        share[static_cast<std::size_t>(start)] < 0.4) {
      continue;
    }
    std::vector<int> stack{start};
    label[static_cast<std::size_t>(start)] = start;
    int x1 = gw, y1 = gh, x2 = -1, y2 = -1, cells = 0;
    double mass = 0;
    std::array<int, kToneCount> votes{};
    while (!stack.empty()) {
      int const k = stack.back();
      stack.pop_back();
      int const cx = k % gw, cy = k / gw;
      x1 = std::min(x1, cx);
      x2 = std::max(x2, cx);
      y1 = std::min(y1, cy);
      y2 = std::max(y2, cy);
      ++cells;
      mass += share[static_cast<std::size_t>(k)];
      for (int t = 0; t < kToneCount; ++t) {
        if (lesion(static_cast<Tone>(t))) votes[static_cast<std::size_t>(t)] += tones[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
      }
      int const nb[4][2] = {{cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
      for (auto const& n : nb) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= gw || n[1] >= gh) continue;
        int const j = n[1] * gw + n[0];
        if (label[static_cast<std::size_t>(j)] < 0 && share[static_cast<std::size_t>(j)] >= 0.4) {
          label[static_cast<std::size_t>(j)] = start;
          stack.push_back(j);
        }
      }
    }
    if (cells < 2) continue;
    auto const dominant = static_cast<Tone>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
    double const W = img.width(), H = img.height();
    CornerBox const c{x1 * cell / W, y1 * cell / H,
                      std::min(W, static_cast<double>((x2 + 1) * cell)) / W,
                      std::min(H, static_cast<double>((y2 + 1) * cell)) / H};
    Detection d;
    d.class_index = detection_class_for(dominant);
    d.confidence = std::min(0.95, 0.2 + 0.7 * mass / cells);
    d.box = NormalizedBox::from_corners(c);
    out.push_back(d);
  }
  return out;
}

}  // namespace paddy::inference
