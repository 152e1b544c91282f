#pragma once

namespace fpvg {

// Axis-aligned box in pixel coordinates using the corner convention.
// A valid box has x1 < x2 and y1 < y2, i.e. strictly positive area.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return width() * height(); }

  // Finite corners and strictly positive extent on both axes.
  bool valid() const noexcept;

  static BoundingBox from_xywh(double x, double y, double w, double h) noexcept {
    return {x, y, x + w, y + h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Area of a ∩ b; boxes that only share an edge intersect with area 0.
double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

// Intersection over union, symmetric, in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

// Fraction of `reference` covered by `candidate`: |c ∩ r| / |r|. Not symmetric.
double coverage_fraction(const BoundingBox& candidate,
                         const BoundingBox& reference) noexcept;

}  // namespace fpvg
