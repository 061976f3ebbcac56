#pragma once

#include "lanekit/regression.hpp"
#include "lanekit/spline.hpp"
#include "lanekit/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <variant>

namespace lanekit {

/// Coefficient of determination of the point set, Cov(X,Y)^2 / (Var(X) Var(Y)).
///
/// Sums are taken after shifting both axes by their rounded means, which keeps
/// integer pixel coordinates integral: points on a line with rational slope
/// give exactly 1. Zero variance on either axis is defined as 1, a vertical or
/// horizontal run being perfectly explained.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar r_squared(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  using std::round;
  const auto m = static_cast<Scalar>(x.size());
  const auto xs = (x.array() - round(x.mean())).matrix().eval();
  const auto ys = (y.array() - round(y.mean())).matrix().eval();
  const Scalar sx = xs.sum();
  const Scalar sy = ys.sum();
  const Scalar sxx = m * xs.squaredNorm() - sx * sx;
  const Scalar syy = m * ys.squaredNorm() - sy * sy;
  const Scalar sxy = m * xs.dot(ys) - sx * sy;
  if (!(sxx > Scalar(0)) || !(syy > Scalar(0))) return Scalar(1);
  const Scalar r2 = (sxy * sxy) / (sxx * syy);
  return r2 > Scalar(1) ? Scalar(1) : r2;
}

double r_squared(std::span<const LanePoint> points);

enum class LaneClass { StraightCandidate, CurvedCandidate, TooFewPoints };

const char* to_string(LaneClass c);

struct ClassifierConfig {
  std::size_t n = 3;       // minimum straight support; curves need 3n
  std::size_t k = 2;       // curve votes required ...
  std::size_t window = 3;  // ... within the last `window` frames, current included
};

/// Straight unless the whole marking fits a line worse than the marking with
/// its n topmost (smallest-y) points removed.
LaneClass classify(std::span<const LanePoint> points, std::size_t n);

/// Current curve candidate confirmed by at least k of the last K frames
/// (history oldest first, current frame appended implicitly).
bool corroborate_curve(bool current_is_candidate, const std::vector<bool>& history, std::size_t k, std::size_t window);

/// Renderable lane geometry.
using LaneShape = std::variant<StraightLine, QuadraticSpline, CubicSpline>;

/// x(y) for any lane shape.
double lane_x(const LaneShape& shape, double y);

struct LaneMarking {
  std::vector<LanePoint> points;  // decreasing y
  LaneShape shape;
  int channel_id = -1;
  bool active_hint = false;
  double y_top = 0.0;     // extent used when sampling the lane
  double y_bottom = 0.0;
  std::optional<Side> side;  // set once the lane is chosen as an active marking
  std::optional<StraightLine> line_fit;  // WLS line of the points, also kept for curved lanes

  /// Geometry used to associate the lane across frames: the WLS line when known.
  [[nodiscard]] LaneShape association_shape() const { return line_fit ? LaneShape(*line_fit) : shape; }

  [[nodiscard]] bool is_straight() const { return std::holds_alternative<StraightLine>(shape); }
  [[nodiscard]] double x_at(double y) const { return lane_x(shape, y); }
  /// Samples x at every integer row in [y_top, y_bottom], bottom row first.
  [[nodiscard]] Polyline sample_rows() const;
};

}  // namespace lanekit
