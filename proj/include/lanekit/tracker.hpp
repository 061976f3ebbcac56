#pragma once

// Multi-frame lane tracking.
//
// Current lanes are associated with tracked lanes by RMS horizontal distance
// over the image height. Each tracked lane carries an evidence weight that
// grows by psi * c * N on every frame it is detected (c the RMS confidence of
// its points, N their count) and is multiplied by e^-1 on every frame it is
// missed, so a contribution made d missed frames ago carries a factor e^-d.

#include "lanekit/lane_model.hpp"
#include "lanekit/types.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lanekit {

/// RMS x-distance between two straight lines over rows [0, h], in closed form.
/// Each line is x(y) = slope * y + offset.
template <typename Scalar>
Scalar rms_x_distance(Scalar slope1, Scalar offset1, Scalar slope2, Scalar offset2, Scalar h) {
  const Scalar p = slope1 - slope2;
  const Scalar q = offset1 - offset2;
  // (1/h) * integral_0^h (p y + q)^2 dy
  const Scalar mean_sq = p * p * h * h / Scalar(3) + p * q * h + q * q;
  using std::sqrt;
  return sqrt(mean_sq > Scalar(0) ? mean_sq : Scalar(0));
}

/// Closed form when both lanes are straight, otherwise the discrete RMS of the
/// x-difference at every integer row in [0, h).
double zeta(const LaneShape& a, const LaneShape& b, int h);

struct TrackerConfig {
  double psi_active = 1.0;
  double psi_inactive = 0.5;
  int match_tol_divisor = 200;  // same lane when zeta <= w / match_tol_divisor
  int max_miss = 10;
  bool pft_enabled = true;
  std::size_t curve_history_length = 8;  // must cover the corroboration window

  void validate() const;
};

struct TrackedLane {
  std::int64_t lane_id = 0;
  LaneShape shape;
  std::optional<StraightLine> line_fit;
  double y_top = 0.0;
  double y_bottom = 0.0;
  double weight = 0.0;
  int miss_count = 0;
  std::deque<bool> curve_history;  // oldest first
  double rms_confidence = 0.0;
  std::size_t point_count = 0;
  bool active_hint = false;
  int channel_id = -1;
  Side side = Side::Left;

  [[nodiscard]] LaneShape association_shape() const { return line_fit ? LaneShape(*line_fit) : shape; }
};

struct Match {
  std::size_t current = 0;
  std::size_t tracked = 0;
  double zeta = 0.0;
};

struct Assignment {
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_current;
  std::vector<std::size_t> unmatched_tracked;

  [[nodiscard]] std::optional<std::size_t> tracked_for(std::size_t current) const;
};

/// Greedy one-to-one association over a current x tracked cost matrix: pairs with
/// cost <= tol are taken in increasing cost. Ties resolve to the lower current
/// index, then the lower tracked index.
Assignment assign_greedy(const Eigen::MatrixXd& cost, double tol);

/// zeta for every (current, tracked) pair.
Eigen::MatrixXd zeta_matrix(std::span<const LaneShape> current, std::span<const LaneShape> tracked, int h);

/// Greedy one-to-one association in increasing zeta among pairs within w / divisor.
/// Ties in zeta resolve to the lower current index, then the lower tracked index.
Assignment match_shapes(std::span<const LaneShape> current, std::span<const LaneShape> tracked, int w, int h,
                        int match_tol_divisor = 200);

/// match_shapes over association shapes (each lane's WLS line where it has one).
Assignment match_lanes(std::span<const LaneMarking> current, std::span<const TrackedLane> tracked, int w, int h,
                       int match_tol_divisor = 200);

/// RMS of the point confidences.
double rms_confidence(std::span<const LanePoint> points);

/// Applies the per-frame weight update: lanes with miss_count == 0 gain
/// psi * rms_confidence * point_count, all others are scaled by e^-1. Lanes whose
/// miss_count exceeds max_miss are removed.
void update_weights(std::vector<TrackedLane>& tracked, const TrackerConfig& cfg);

/// Side of the lane at the bottom row: x >= w/2 is Right.
Side side_of(const LaneShape& shape, int w, int h);

struct ActiveSelection {
  std::optional<TrackedLane> left;
  std::optional<TrackedLane> right;
};

/// Highest-weight lane on each side; ties keep the lower lane_id.
ActiveSelection select_active(std::span<const TrackedLane> tracked, int w, int h);

/// A lane observed in the current frame, ready to be merged into the tracker.
struct Observation {
  LaneMarking lane;
  bool curve_candidate = false;
};

/// Tracker state owned by one video stream.
class LaneTracker {
 public:
  explicit LaneTracker(TrackerConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  /// Merges this frame's observations (already associated through `assignment`,
  /// computed against tracked()), updates weights and drops stale lanes.
  void update(std::span<const Observation> observations, const Assignment& assignment, int w, int h);

  [[nodiscard]] const std::vector<TrackedLane>& tracked() const { return lanes_; }
  [[nodiscard]] const TrackerConfig& config() const { return cfg_; }
  [[nodiscard]] std::int64_t frames_seen() const { return frames_; }
  void reset();

  /// Structured-text snapshot (JSON) for debugging and golden tests.
  [[nodiscard]] std::string snapshot() const;

 private:
  TrackerConfig cfg_;
  std::vector<TrackedLane> lanes_;
  std::int64_t next_id_ = 0;
  std::int64_t frames_ = 0;
};

}  // namespace lanekit
