#include "lanekit/regression.hpp"

#include <cmath>

namespace lanekit {

namespace {

struct PointColumns {
  Eigen::VectorXd x, y, c;
};

PointColumns columns(std::span<const LanePoint> points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  PointColumns cols{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    cols.x(i) = p.x;
    cols.y(i) = p.y;
    cols.c(i) = p.confidence;
  }
  return cols;
}

}  // namespace

WlsFit wls_fit(std::span<const LanePoint> points) {
  const auto cols = columns(points);
  return weighted_line_fit(cols.x, cols.y, cols.c);
}

std::vector<LanePoint> remove_outliers(std::span<const LanePoint> points, const WlsFit& fit, double kappa) {
  std::vector<LanePoint> kept(points.begin(), points.end());
  if (points.size() <= 3 || fit.beta1 == 0.0) return kept;

  const auto cols = columns(points);
  const Eigen::ArrayXd residual = (cols.x.array() - (cols.y.array() - fit.beta0) / fit.beta1).abs();
  const double rms = std::sqrt(residual.square().mean());
  const double cut = kappa * rms;

  kept.clear();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(residual(static_cast<Eigen::Index>(i)) > cut)) kept.push_back(points[i]);
  }
  return kept;
}

WlsFit fit_straight(std::span<const LanePoint> points, const RegressionConfig& cfg) {
  if (points.size() < cfg.min_points) throw DegenerateFitError("fit_straight: too few points");
  const WlsFit first = wls_fit(points);
  if (std::abs(first.beta1) < cfg.min_abs_gradient) throw DegenerateFitError("fit_straight: near-horizontal line");

  const auto survivors = remove_outliers(points, first, cfg.kappa);
  if (survivors.size() < cfg.min_points) throw DegenerateFitError("fit_straight: too few inliers");
  WlsFit final_fit = survivors.size() == points.size() ? first : wls_fit(survivors);
  if (std::abs(final_fit.beta1) < cfg.min_abs_gradient) {
    throw DegenerateFitError("fit_straight: near-horizontal line");
  }
  return final_fit;
}

StraightLine fit_straight_line(std::span<const LanePoint> points, const RegressionConfig& cfg) {
  try {
    return StraightLine::from_fit(fit_straight(points, cfg));
  } catch (const VerticalLaneError& v) {
    if (points.size() < cfg.min_points) throw DegenerateFitError("fit_straight: too few points");
    return StraightLine::vertical(v.x());
  }
}

}  // namespace lanekit
