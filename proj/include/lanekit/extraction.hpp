#pragma once

#include "lanekit/types.hpp"

#include <vector>

namespace lanekit {

struct ExtractionConfig {
  double alpha = 0.5;          // fraction of the channel maximum
  double tau_min = 0.1;        // absolute floor
  int row_step_divisor = 20;   // window height = h / row_step_divisor
  int col_span_divisor = 2;    // window width  = w / col_span_divisor, centred
  int max_gap_windows = 3;     // empty windows bridged before a re-seed
  int max_reseeds = 1;

  void validate() const;
};

/// max(tau_min, alpha * max(channel)). A cell is salient when strictly above it.
double adaptive_threshold(const ConfidenceGrid& channel, const ExtractionConfig& cfg);

/// Follows one lane marking up a single channel.
///
/// The bottom-most row holding a salient cell seeds the lane at that row's
/// strongest cell. From each accepted point the next h/20 rows above, within
/// w/4 columns either side, are searched and the strongest salient cell is
/// accepted (ties: smaller y, then smaller x). An empty window slides up by
/// another window height; after more than max_gap_windows empty windows the
/// scan re-seeds from the next salient row above, at most max_reseeds times.
/// Returned points have strictly decreasing y.
std::vector<LanePoint> extract_lane_points(const ConfidenceGrid& channel, const ExtractionConfig& cfg);

}  // namespace lanekit
