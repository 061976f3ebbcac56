#pragma once

// Confidence-weighted straight-line fitting for lane markings.
//
// The line model regresses image y on image x,
//
//     y = beta0 + beta1 * x,
//
// with each observation weighted by its detector confidence. The estimate is
// the solution of the weighted normal equations (X^T C X) beta = X^T C y where
// X = [1 x] and C = diag(c). Lanes are rendered and matched through the
// inverse x(y) = (y - beta0) / beta1.

#include "lanekit/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <span>

namespace lanekit {

/// The normal matrix is singular: every point shares one x (a vertical lane).
class VerticalLaneError : public Error {
 public:
  explicit VerticalLaneError(double x)
      : Error("vertical lane: all points share x = " + std::to_string(x)), x_(x) {}
  [[nodiscard]] double x() const { return x_; }

 private:
  double x_;
};

/// Too few points survive for a fit, or the fitted line is near-horizontal.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
struct WeightedLineFit {
  Scalar beta0 = 0;  // y-intercept
  Scalar beta1 = 0;  // gradient dy/dx
  Scalar weighted_sse = 0;
  Eigen::Index support = 0;
};

/// Weighted least-squares estimate of y = beta0 + beta1 x.
///
/// Any Eigen vector expressions are accepted. Throws VerticalLaneError when
/// the weighted spread of x is zero and std::invalid_argument on size mismatch
/// or fewer than two observations.
template <typename DerivedX, typename DerivedY, typename DerivedW>
WeightedLineFit<typename DerivedX::Scalar> weighted_line_fit(const Eigen::MatrixBase<DerivedX>& x,
                                                             const Eigen::MatrixBase<DerivedY>& y,
                                                             const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedX::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index m = x.size();
  if (y.size() != m || w.size() != m) throw std::invalid_argument("weighted_line_fit: size mismatch");
  if (m < 2) throw std::invalid_argument("weighted_line_fit: need at least two observations");

  // Centre x on its weighted mean before forming the 2x2 system; the solution is
  // mapped back to the uncentred intercept below.
  const Scalar wsum = w.sum();
  const Scalar xbar = w.dot(x) / wsum;
  const Vec xc = x.array() - xbar;

  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(m, 2);
  design.col(0).setOnes();
  design.col(1) = xc;
  const Eigen::Matrix<Scalar, 2, 2> normal = design.transpose() * w.asDiagonal() * design;
  const Eigen::Matrix<Scalar, 2, 1> rhs = design.transpose() * (w.array() * y.array()).matrix();

  // Weighted spread of x relative to its raw second moment; rounding in xbar
  // leaves a tiny positive spread when every x is identical.
  const Scalar spread = normal(1, 1);
  const Scalar scale = w.dot(x.cwiseAbs2());
  if (!(spread > Scalar(64) * std::numeric_limits<Scalar>::epsilon() * scale)) {
    throw VerticalLaneError(static_cast<double>(xbar));
  }

  const Eigen::Matrix<Scalar, 2, 1> beta_c = normal.ldlt().solve(rhs);
  WeightedLineFit<Scalar> fit;
  fit.beta1 = beta_c(1);
  fit.beta0 = beta_c(0) - beta_c(1) * xbar;
  const Vec resid = y - design * beta_c;
  fit.weighted_sse = w.dot(resid.cwiseAbs2());
  fit.support = m;
  return fit;
}

using WlsFit = WeightedLineFit<double>;

/// A straight lane expressed as x(y). Sloped lanes keep the y-on-x parameters,
/// vertical lanes store their constant x.
struct StraightLine {
  double beta0 = 0.0;
  double beta1 = 1.0;
  std::optional<double> vertical_x;

  static StraightLine from_fit(const WlsFit& fit) { return {fit.beta0, fit.beta1, std::nullopt}; }
  static StraightLine vertical(double x) { return {0.0, 0.0, x}; }

  [[nodiscard]] double x_at(double y) const {
    return vertical_x ? *vertical_x : (y - beta0) / beta1;
  }
  /// x(y) = slope * y + offset
  [[nodiscard]] double slope() const { return vertical_x ? 0.0 : 1.0 / beta1; }
  [[nodiscard]] double offset() const { return vertical_x ? *vertical_x : -beta0 / beta1; }
};

struct RegressionConfig {
  double kappa = 2.5;              // outlier cut, multiples of the RMS x-residual
  double min_abs_gradient = 1e-6;  // |beta1| below this is rejected as horizontal noise
  std::size_t min_points = 3;
};

/// Fit over lane points with their confidences as weights.
WlsFit wls_fit(std::span<const LanePoint> points);

/// Drops points whose x-distance to the fitted line exceeds kappa times the RMS
/// x-distance. Inputs of three or fewer points come back unchanged.
std::vector<LanePoint> remove_outliers(std::span<const LanePoint> points, const WlsFit& fit, double kappa);

/// Fit, one outlier pass, refit on survivors.
///
/// Throws VerticalLaneError when the points share one x, DegenerateFitError when
/// fewer than cfg.min_points survive or the line is near-horizontal.
WlsFit fit_straight(std::span<const LanePoint> points, const RegressionConfig& cfg = {});

/// fit_straight wrapped into a renderable line, resolving vertical lanes to x = const.
StraightLine fit_straight_line(std::span<const LanePoint> points, const RegressionConfig& cfg = {});

}  // namespace lanekit
