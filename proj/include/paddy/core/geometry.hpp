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

namespace paddy {

/// Axis-aligned box given by its corners, in any coordinate frame.
struct CornerBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool degenerate() const { return !(x2 > x1) || !(y2 > y1); }

  friend bool operator==(CornerBox const&, CornerBox const&) = default;
};

/// Centre/size box in fractions of the image dimensions (YOLO convention).
struct NormalizedBox {
  double cx = 0;
  double cy = 0;
  double w = 0;
  double h = 0;

  /// Centre in [0,1]², positive size of at most 1. Extents are checked
  /// against the frame with a 1e-9 slack for values that were round-tripped
  /// through fixed-point text.
  bool valid() const;
  bool inside_frame(double slack = 1e-9) const;
  NormalizedBox clamped() const;
  CornerBox corners() const;
  static NormalizedBox from_corners(CornerBox const& c);

  friend bool operator==(NormalizedBox const&, NormalizedBox const&) = default;
};

/// Throws InvalidInput unless `box.valid()`.
void require_valid(NormalizedBox const& box);

struct GeoPoint {
  double latitude = 0;
  double longitude = 0;

  bool valid() const;
  friend bool operator==(GeoPoint const&, GeoPoint const&) = default;
};

/// Closed latitude/longitude rectangle.
struct GeoRect {
  double min_lat = -90;
  double min_lon = -180;
  double max_lat = 90;
  double max_lon = 180;

  bool contains(GeoPoint const& p) const {
    return p.latitude >= min_lat && p.latitude <= max_lat &&
           p.longitude >= min_lon && p.longitude <= max_lon;
  }
};

}  // namespace paddy
