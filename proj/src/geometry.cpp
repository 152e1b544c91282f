#include "fpvg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fpvg {

bool BoundingBox::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 < x2 && y1 < y2;
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::min(1.0, inter / uni);
}

double coverage_fraction(const BoundingBox& candidate,
                         const BoundingBox& reference) noexcept {
  const double inter = intersection_area(candidate, reference);
  if (inter == 0.0) return 0.0;
  return std::min(1.0, inter / reference.area());
}

}  // namespace fpvg
