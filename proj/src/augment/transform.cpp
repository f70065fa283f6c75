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

#include "paddy/augment/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "paddy/core/error.hpp"
#include "paddy/core/taxonomy.hpp"

namespace paddy::augment {
namespace {

constexpr double kGrid = 1e6;
constexpr std::int64_t kGridMax = 1'000'000;

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

bool finite_all(TransformSpec const& t) {
  return std::isfinite(t.rotation_deg) && std::isfinite(t.brightness_delta) &&
         std::isfinite(t.shear_x_deg);
}

// Snaps a centre/extent pair onto the annotation grid while keeping the
// extent inside [0, 1]. Returns false if nothing of positive size remains.
bool snap_axis(double centre, double extent, double& out_c, double& out_e) {
  std::int64_t c = std::llround(centre * kGrid);
  std::int64_t e = std::llround(extent * kGrid);
  c = std::clamp<std::int64_t>(c, 0, kGridMax);
  e = std::min({e, 2 * c, 2 * (kGridMax - c)});
  if (e < 1) return false;
  out_c = static_cast<double>(c) / kGrid;
  out_e = static_cast<double>(e) / kGrid;
  return true;
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0, 255.0));
}

RasterImage adjust_brightness(RasterImage image, double delta) {
  if (delta == 0) return image;
  double const shift = delta * 255.0;
  for (auto& p : image.pixels()) p = clamp_byte(p + shift);
  return image;
}

RasterImage resample(RasterImage const& src, Affine const& forward) {
  Affine const inv = forward.inverse();
  int const w = src.width(), h = src.height();
  RasterImage out(w, h);
  auto sample = [&](int x, int y, int c) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return src.at(x, y, c);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double const qx = x + 0.5, qy = y + 0.5;
      double const u = inv.map_x(qx, qy) - 0.5;
      double const v = inv.map_y(qx, qy) - 0.5;
      double const fu = std::floor(u), fv = std::floor(v);
      if (fu < -1 || fv < -1 || fu > w || fv > h) continue;
      int const x0 = static_cast<int>(fu), y0 = static_cast<int>(fv);
      double const ax = u - fu, ay = v - fv;
      for (int c = 0; c < RasterImage::kChannels; ++c) {
        double const top =
            (1 - ax) * sample(x0, y0, c) + ax * sample(x0 + 1, y0, c);
        double const bottom =
            (1 - ax) * sample(x0, y0 + 1, c) + ax * sample(x0 + 1, y0 + 1, c);
        out.at(x, y, c) = clamp_byte((1 - ay) * top + ay * bottom);
      }
    }
  }
  return out;
}

void require_min_visibility(double min_visibility) {
  if (!(min_visibility > 0 && min_visibility <= 1)) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("min_visibility {} outside (0, 1]", min_visibility));
  }
}

}  // namespace

bool TransformSpec::valid() const {
  return finite_all(*this) && rotation_deg >= -180 && rotation_deg <= 180 &&
         std::abs(brightness_delta) <= 1 && std::abs(shear_x_deg) < 90;
}

bool TransformSpec::geometric_identity() const {
  return rotation_deg == 0 && shear_x_deg == 0 && !hflip && !vflip;
}

void AugmentConfig::validate() const {
  auto check_range = [](Range const& r, double limit, char const* name) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > 0 || r.hi < 0 ||
        r.lo < -limit || r.hi > limit) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("{} range [{}, {}] must contain 0 and lie within ±{}",
                       name, r.lo, r.hi, limit));
    }
  };
  check_range(rotation_deg, 180, "rotation");
  check_range(brightness, 1, "brightness");
  check_range(shear_x_deg, 89.999, "shear");
  for (double p : {hflip_probability, vflip_probability}) {
    if (!(p >= 0 && p <= 1)) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("flip probability {} outside [0, 1]", p));
    }
  }
  require_min_visibility(min_visibility);
}

Affine Affine::inverse() const {
  double const det = a * d - b * c;
  if (det == 0 || !std::isfinite(det)) {
    fail(ErrorCode::kInvalidInput, "singular affine map");
  }
  Affine inv;
  inv.a = d / det;
  inv.b = -b / det;
  inv.c = -c / det;
  inv.d = a / det;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

Affine transform_matrix(TransformSpec const& spec, int width, int height) {
  double const th = radians(spec.rotation_deg);
  double const cs = std::cos(th), sn = std::sin(th);
  double const k = std::tan(radians(spec.shear_x_deg));
  double const fx = spec.hflip ? -1.0 : 1.0;
  double const fy = spec.vflip ? -1.0 : 1.0;

  // F · R · S with S = [[1, k], [0, 1]], R = [[cs, -sn], [sn, cs]].
  Affine m;
  m.a = fx * cs;
  m.b = fx * (cs * k - sn);
  m.c = fy * sn;
  m.d = fy * (sn * k + cs);
  double const cx = width / 2.0, cy = height / 2.0;
  m.tx = cx - (m.a * cx + m.b * cy);
  m.ty = cy - (m.c * cx + m.d * cy);
  return m;
}

std::vector<BoxOutcome> transform_boxes(std::span<LabeledBox const> boxes,
                                        TransformSpec const& spec, int width,
                                        int height, double min_visibility) {
  if (!spec.valid()) fail(ErrorCode::kInvalidInput, "invalid transform spec");
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidInput, "image dimensions must be positive");
  }
  require_min_visibility(min_visibility);

  std::vector<BoxOutcome> out;
  out.reserve(boxes.size());
  if (spec.geometric_identity()) {
    for (auto const& b : boxes) out.push_back({b, 1.0, true});
    return out;
  }

  Affine const m = transform_matrix(spec, width, height);
  double const W = width, H = height;
  for (auto const& b : boxes) {
    CornerBox const c = b.box.corners();
    double const xs[] = {c.x1 * W, c.x2 * W};
    double const ys[] = {c.y1 * H, c.y2 * H};
    double hx1 = INFINITY, hy1 = INFINITY, hx2 = -INFINITY, hy2 = -INFINITY;
    for (double x : xs) {
      for (double y : ys) {
        double const px = m.map_x(x, y), py = m.map_y(x, y);
        hx1 = std::min(hx1, px);
        hx2 = std::max(hx2, px);
        hy1 = std::min(hy1, py);
        hy2 = std::max(hy2, py);
      }
    }
    double const hull_area = (hx2 - hx1) * (hy2 - hy1);
    double const cx1 = std::max(hx1, 0.0), cx2 = std::min(hx2, W);
    double const cy1 = std::max(hy1, 0.0), cy2 = std::min(hy2, H);
    double const clipped =
        std::max(0.0, cx2 - cx1) * std::max(0.0, cy2 - cy1);

    BoxOutcome o;
    o.box.class_index = b.class_index;
    o.visibility = hull_area > 0 ? clipped / hull_area : 0.0;
    if (o.visibility >= min_visibility) {
      NormalizedBox nb;
      o.kept = snap_axis((cx1 + cx2) / (2 * W), (cx2 - cx1) / W, nb.cx, nb.w) &&
               snap_axis((cy1 + cy2) / (2 * H), (cy2 - cy1) / H, nb.cy, nb.h);
      o.box.box = nb;
    }
    out.push_back(o);
  }
  return out;
}

AnnotatedImage apply_transform(AnnotatedImage const& input,
                               TransformSpec const& spec,
                               double min_visibility) {
  if (input.image.empty()) fail(ErrorCode::kInvalidInput, "empty image");
  for (auto const& b : input.boxes) {
    require_valid(b.box);
    if (b.class_index < 0 || b.class_index >= kNumDetectionClasses) {
      fail(ErrorCode::kInvalidInput,
           fmt::format("detection class {} out of range", b.class_index));
    }
  }
  auto outcomes = transform_boxes(input.boxes, spec, input.image.width(),
                                  input.image.height(), min_visibility);
  if (spec.identity()) return input;

  AnnotatedImage out;
  out.image = spec.geometric_identity()
                  ? input.image
                  : resample(input.image, transform_matrix(spec,
                                                           input.image.width(),
                                                           input.image.height()));
  out.image = adjust_brightness(std::move(out.image), spec.brightness_delta);
  for (auto const& o : outcomes) {
    if (o.kept) out.boxes.push_back(o.box);
  }
  return out;
}

TransformSpec random_transform(AugmentConfig const& config,
                               std::uint64_t draw_index) {
  config.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(draw_index),
                    static_cast<std::uint32_t>(draw_index >> 32)};
  std::mt19937_64 gen(seq);
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto draw = [&](Range const& r) {
    double const u = unit();
    return r.lo == r.hi ? r.lo : r.lo + (r.hi - r.lo) * u;
  };

  TransformSpec t;
  t.rotation_deg = draw(config.rotation_deg);
  t.shear_x_deg = draw(config.shear_x_deg);
  t.brightness_delta = draw(config.brightness);
  t.hflip = unit() < config.hflip_probability;
  t.vflip = unit() < config.vflip_probability;
  return t;
}

}  // namespace paddy::augment
