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

#include "paddy/core/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "paddy/core/error.hpp"

namespace paddy {

bool NormalizedBox::valid() const {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    return false;
  }
  return cx >= 0 && cx <= 1 && cy >= 0 && cy <= 1 && w > 0 && w <= 1 &&
         h > 0 && h <= 1;
}

bool NormalizedBox::inside_frame(double slack) const {
  return cx - w / 2 >= -slack && cx + w / 2 <= 1 + slack &&
         cy - h / 2 >= -slack && cy + h / 2 <= 1 + slack;
}

NormalizedBox NormalizedBox::clamped() const {
  return {std::clamp(cx, 0.0, 1.0), std::clamp(cy, 0.0, 1.0),
          std::clamp(w, 0.0, 1.0), std::clamp(h, 0.0, 1.0)};
}

CornerBox NormalizedBox::corners() const {
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

NormalizedBox NormalizedBox::from_corners(CornerBox const& c) {
  return {(c.x1 + c.x2) / 2, (c.y1 + c.y2) / 2, c.width(), c.height()};
}

void require_valid(NormalizedBox const& box) {
  if (!box.valid()) {
    fail(ErrorCode::kInvalidInput,
         fmt::format("invalid normalized box ({}, {}, {}, {})", box.cx, box.cy,
                     box.w, box.h));
  }
}

bool GeoPoint::valid() const {
  return std::isfinite(latitude) && std::isfinite(longitude) &&
         latitude >= -90 && latitude <= 90 && longitude >= -180 &&
         longitude <= 180;
}

}  // namespace paddy
