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

#include <cstdint>
#include <span>
#include <vector>

#include "paddy/core/geometry.hpp"
#include "paddy/core/raster.hpp"

namespace paddy::augment {

/// One concrete augmentation. Geometric parts act about the image centre in
/// the order shear, rotation, flips; brightness is applied afterwards.
struct TransformSpec {
  double rotation_deg = 0;
  bool hflip = false;
  bool vflip = false;
  /// Fraction of full scale (255) added to every channel.
  double brightness_delta = 0;
  double shear_x_deg = 0;

  bool valid() const;
  bool geometric_identity() const;
  bool identity() const { return geometric_identity() && brightness_delta == 0; }

  friend bool operator==(TransformSpec const&, TransformSpec const&) = default;
};

struct Range {
  double lo = 0;
  double hi = 0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(Range const&, Range const&) = default;
};

struct AugmentConfig {
  Range rotation_deg{-30, 30};
  Range brightness{-0.2, 0.2};
  Range shear_x_deg{-10, 10};
  double hflip_probability = 0.5;
  double vflip_probability = 0.5;
  double min_visibility = 0.30;
  std::uint64_t seed = 0;

  /// Throws InvalidInput if a range excludes 0 or leaves its legal domain,
  /// a probability is outside [0,1], or min_visibility is outside (0,1].
  void validate() const;
};

struct LabeledBox {
  int class_index = 0;
  NormalizedBox box;

  friend bool operator==(LabeledBox const&, LabeledBox const&) = default;
};

struct AnnotatedImage {
  RasterImage image;
  std::vector<LabeledBox> boxes;
};

/// Forward point map x' = A x + t in continuous pixel coordinates, where
/// pixel (i, j) covers [i, i+1) × [j, j+1).
struct Affine {
  double a = 1, b = 0, c = 0, d = 1;
  double tx = 0, ty = 0;

  double map_x(double x, double y) const { return a * x + b * y + tx; }
  double map_y(double x, double y) const { return c * x + d * y + ty; }
  Affine inverse() const;
};

Affine transform_matrix(TransformSpec const& spec, int width, int height);

struct BoxOutcome {
  /// Transformed box; meaningful only when `kept`.
  LabeledBox box;
  /// In-frame share of the transformed hull: clipped area / hull area.
  double visibility = 0;
  bool kept = false;
};

/// Maps each box's corners through the transform, takes the axis-aligned
/// hull, clips it to the frame and keeps it when visibility reaches
/// `min_visibility`. Kept boxes are snapped to the 1e-6 grid used by
/// annotation files. The identity transform returns boxes untouched.
std::vector<BoxOutcome> transform_boxes(std::span<LabeledBox const> boxes,
                                        TransformSpec const& spec, int width,
                                        int height, double min_visibility);

/// Resamples the image (bilinear, black outside the source) and transforms
/// the boxes, dropping those under `min_visibility`.
AnnotatedImage apply_transform(AnnotatedImage const& input,
                               TransformSpec const& spec,
                               double min_visibility);

/// Draws a spec uniformly from the configured ranges. The generator is
/// seeded from (config.seed, draw_index) alone, so draws are reproducible
/// and independent of the order in which they are requested.
TransformSpec random_transform(AugmentConfig const& config,
                               std::uint64_t draw_index);

}  // namespace paddy::augment
