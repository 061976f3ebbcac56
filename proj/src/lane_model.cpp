#include "lanekit/lane_model.hpp"

#include <algorithm>
#include <cmath>

namespace lanekit {

namespace {

Eigen::VectorXd xs(std::span<const LanePoint> points) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(static_cast<Eigen::Index>(i)) = points[i].x;
  return v;
}

Eigen::VectorXd ys(std::span<const LanePoint> points) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) v(static_cast<Eigen::Index>(i)) = points[i].y;
  return v;
}

}  // namespace

double r_squared(std::span<const LanePoint> points) {
  if (points.size() < 2) throw std::invalid_argument("r_squared: need at least two points");
  return r_squared(xs(points), ys(points));
}

const char* to_string(LaneClass c) {
  switch (c) {
    case LaneClass::StraightCandidate: return "straight";
    case LaneClass::CurvedCandidate: return "curved";
    case LaneClass::TooFewPoints: return "too_few_points";
  }
  return "?";
}

LaneClass classify(std::span<const LanePoint> points, std::size_t n) {
  if (points.size() < n || points.size() < 2) return LaneClass::TooFewPoints;
  if (points.size() < 3 * n) return LaneClass::StraightCandidate;

  std::vector<LanePoint> truncated(points.begin(), points.end());
  std::stable_sort(truncated.begin(), truncated.end(),
                   [](const LanePoint& a, const LanePoint& b) { return a.y > b.y; });
  truncated.resize(truncated.size() - n);

  const double whole = r_squared(points);
  const double trunc = r_squared(truncated);
  // Margin keeps rounding noise on collinear data from reading as a curve.
  return whole < trunc - 1e-12 ? LaneClass::CurvedCandidate : LaneClass::StraightCandidate;
}

bool corroborate_curve(bool current_is_candidate, const std::vector<bool>& history, std::size_t k, std::size_t window) {
  if (!current_is_candidate) return false;
  std::size_t votes = 1;
  const std::size_t lookback = window > 0 ? window - 1 : 0;
  const std::size_t start = history.size() > lookback ? history.size() - lookback : 0;
  for (std::size_t i = start; i < history.size(); ++i) votes += history[i] ? 1 : 0;
  return votes >= k;
}

double lane_x(const LaneShape& shape, double y) {
  return std::visit(
      [y](const auto& s) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, StraightLine>) {
          return s.x_at(y);
        } else {
          return s(y);
        }
      },
      shape);
}

Polyline LaneMarking::sample_rows() const {
  Polyline out;
  const auto bottom = static_cast<long>(std::floor(y_bottom));
  const auto top = static_cast<long>(std::ceil(y_top));
  for (long y = bottom; y >= top; --y) out.push_back({x_at(static_cast<double>(y)), static_cast<double>(y)});
  return out;
}

}  // namespace lanekit
