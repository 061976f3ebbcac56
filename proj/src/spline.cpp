#include "lanekit/spline.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace lanekit {

std::vector<LanePoint> collapse_rows(std::span<const LanePoint> points) {
  std::vector<LanePoint> sorted(points.begin(), points.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const LanePoint& a, const LanePoint& b) {
    if (a.y != b.y) return a.y > b.y;
    return a.confidence > b.confidence;
  });
  std::vector<LanePoint> out;
  out.reserve(sorted.size());
  for (const auto& p : sorted) {
    if (out.empty() || out.back().y != p.y) out.push_back(p);
  }
  return out;
}

std::size_t PiecewiseCurve::piece_index(double y) const {
  // knots_ ascending in y; pick the last piece whose start is <= y
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), y,
                                   [](double v, const Point2& k) { return v < k.y; });
  const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, pieces_.size() - 1);
}

double PiecewiseCurve::operator()(double y) const {
  if (y < y_min()) return knots_.front().x + derivative(y_min(), false) * (y - y_min());
  if (y > y_max()) return knots_.back().x + derivative(y_max(), true) * (y - y_max());
  if (y == y_max()) return knots_.back().x;
  const std::size_t i = piece_index(y);
  if (y == knots_[i].y) return knots_[i].x;
  const Piece& p = pieces_[i];
  const double t = y - knots_[i].y;
  return p.a + t * (p.b + t * (p.c + t * p.d));
}

double PiecewiseCurve::derivative(double y, bool from_below) const {
  std::size_t i;
  if (y <= y_min()) {
    i = 0;
    y = y_min();
  } else if (y >= y_max()) {
    i = pieces_.size() - 1;
    y = y_max();
  } else {
    i = piece_index(y);
    if (from_below && i > 0 && y == knots_[i].y) --i;
  }
  const Piece& p = pieces_[i];
  const double t = y - knots_[i].y;
  return p.b + t * (2.0 * p.c + 3.0 * t * p.d);
}

double PiecewiseCurve::derivative(double y) const { return derivative(y, false); }

QuadraticSpline::QuadraticSpline(std::span<const LanePoint> points) {
  const auto rows = collapse_rows(points);  // descending y: rows[0] is the bottom knot
  if (rows.size() < 3) throw DataError("quadratic spline needs at least three distinct rows");
  degree_ = 2;

  const std::size_t n = rows.size();
  // Build from the bottom knot upward, then store pieces in ascending-y order.
  std::vector<Piece> upward(n - 1);
  double slope = (rows[1].x - rows[0].x) / (rows[1].y - rows[0].y);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = rows[i + 1].y - rows[i].y;  // negative: moving up the image
    const double c = (rows[i + 1].x - rows[i].x - slope * h) / (h * h);
    upward[i] = {rows[i].x, slope, c, 0.0};
    slope += 2.0 * c * h;
  }

  knots_.resize(n);
  pieces_.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) knots_[k] = {rows[n - 1 - k].x, rows[n - 1 - k].y};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // upward piece j spans rows[j] (bottom) to rows[j+1]; re-expand about rows[j+1].
    const Piece& u = upward[n - 2 - k];
    const double h = knots_[k].y - knots_[k + 1].y;  // = rows[j+1].y - rows[j].y
    pieces_[k] = {knots_[k].x, u.b + 2.0 * u.c * h, u.c, 0.0};
  }
}

CubicSpline::CubicSpline(std::span<const LanePoint> points) {
  const auto rows = collapse_rows(points);
  if (rows.size() < 2) throw DataError("cubic spline needs at least two distinct rows");
  degree_ = 3;
  const std::size_t n = rows.size();
  knots_.resize(n);
  for (std::size_t k = 0; k < n; ++k) knots_[k] = {rows[n - 1 - k].x, rows[n - 1 - k].y};

  // Second derivatives M_k at the knots; natural ends M_0 = M_{n-1} = 0.
  Eigen::VectorXd second = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (n > 2) {
    const auto interior = static_cast<Eigen::Index>(n - 2);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(interior, interior);
    Eigen::VectorXd rhs(interior);
    for (Eigen::Index r = 0; r < interior; ++r) {
      const auto k = static_cast<std::size_t>(r + 1);
      const double h0 = knots_[k].y - knots_[k - 1].y;
      const double h1 = knots_[k + 1].y - knots_[k].y;
      a(r, r) = 2.0 * (h0 + h1);
      if (r > 0) a(r, r - 1) = h0;
      if (r + 1 < interior) a(r, r + 1) = h1;
      rhs(r) = 6.0 * ((knots_[k + 1].x - knots_[k].x) / h1 - (knots_[k].x - knots_[k - 1].x) / h0);
    }
    second.segment(1, interior) = a.partialPivLu().solve(rhs);
  }

  pieces_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = knots_[k + 1].y - knots_[k].y;
    const double m0 = second(static_cast<Eigen::Index>(k));
    const double m1 = second(static_cast<Eigen::Index>(k + 1));
    const double b = (knots_[k + 1].x - knots_[k].x) / h - h * (2.0 * m0 + m1) / 6.0;
    pieces_[k] = {knots_[k].x, b, m0 / 2.0, (m1 - m0) / (6.0 * h)};
  }
}

}  // namespace lanekit
