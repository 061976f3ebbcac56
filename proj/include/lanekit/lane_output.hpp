#pragma once

// Lane output files (JSON, fixed key order):
//
// {
//   "format": "lanekit-lanes", "version": 1, "frame_id": <int>, "count": <n>,
//   "lanes": [
//     {"index": i, "kind": "straight"|"curved"|"cubic", "side": "left"|"right"|null,
//      "channel": c, "beta0": .., "beta1": .. | "vertical_x": ..,   (straight)
//      "knots": [[x, y], ...],                                      (curved/cubic)
//      "points": [[x, y], ...]}                                      sampled lane
//   ]
// }
//
// Points are sampled at the requested rows, or at every row of the lane's extent
// (bottom first) when no rows are given.

#include "lanekit/lane_model.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace lanekit {

struct LaneOutputOptions {
  std::int64_t frame_id = 0;
  std::vector<double> sample_rows;
};

std::string format_lane_output(std::span<const LaneMarking> lanes, const LaneOutputOptions& opts = {});

/// Throws DataError when the file cannot be written.
void write_lane_output(std::span<const LaneMarking> lanes, const std::filesystem::path& path,
                       const LaneOutputOptions& opts = {});

struct LaneRecord {
  std::string kind;
  std::optional<Side> side;
  int channel = -1;
  double beta0 = 0.0;
  double beta1 = 0.0;
  std::optional<double> vertical_x;
  std::vector<Point2> knots;
  Polyline points;

  /// Rebuilds the lane geometry from the stored parameters or knots.
  [[nodiscard]] LaneShape shape() const;
};

struct LaneFile {
  std::int64_t frame_id = 0;
  std::vector<LaneRecord> lanes;
};

LaneFile parse_lane_output(const std::string& text);

}  // namespace lanekit
