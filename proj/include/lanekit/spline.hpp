#pragma once

// Piecewise polynomial lane curves x(y), parameterised by image row.

#include "lanekit/types.hpp"

#include <span>
#include <vector>

namespace lanekit {

/// Piece i covers [y_i, y_{i+1}] with x(y) = a_i + b_i t + c_i t^2 + d_i t^3, t = y - y_i.
/// Outside the knot range the curve continues linearly along the end tangent.
class PiecewiseCurve {
 public:
  PiecewiseCurve() = default;

  [[nodiscard]] double operator()(double y) const;
  [[nodiscard]] double derivative(double y) const;
  /// One-sided derivative at y, taken from the piece on the left (lower y) when from_below.
  [[nodiscard]] double derivative(double y, bool from_below) const;

  [[nodiscard]] const std::vector<Point2>& knots() const { return knots_; }  // ascending y
  [[nodiscard]] double y_min() const { return knots_.front().y; }
  [[nodiscard]] double y_max() const { return knots_.back().y; }
  [[nodiscard]] int degree() const { return degree_; }

 protected:
  struct Piece {
    double a, b, c, d;
  };
  [[nodiscard]] std::size_t piece_index(double y) const;

  std::vector<Point2> knots_;
  std::vector<Piece> pieces_;
  int degree_ = 0;
};

/// C1 piecewise-quadratic interpolant. The piece touching the first input knot
/// (the bottom of the lane) takes its slope from the secant to the second knot;
/// every further piece inherits the end slope of its neighbour.
class QuadraticSpline : public PiecewiseCurve {
 public:
  QuadraticSpline() = default;
  /// Points in extraction order (decreasing y). Duplicate rows collapse onto the
  /// higher-confidence point. Throws DataError with fewer than three distinct rows.
  explicit QuadraticSpline(std::span<const LanePoint> points);
};

/// Natural cubic spline interpolant (zero second derivative at both ends).
/// Two knots degenerate to the connecting segment.
class CubicSpline : public PiecewiseCurve {
 public:
  CubicSpline() = default;
  explicit CubicSpline(std::span<const LanePoint> points);
};

/// Sort by descending y and keep the best-confidence point per row.
std::vector<LanePoint> collapse_rows(std::span<const LanePoint> points);

}  // namespace lanekit
