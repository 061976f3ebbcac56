#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lanekit {

// Row-major so that row(y) is a contiguous scanline, matching the on-disk layout.
using ConfidenceGrid = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad header, truncated payload, bad ground truth).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Prediction and ground-truth sequences do not line up by frame id.
class FrameAlignmentError : public DataError {
 public:
  using DataError::DataError;
};

/// Image coordinates: origin top-left, y grows downward.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

using Polyline = std::vector<Point2>;

struct LanePoint {
  double x = 0.0;
  double y = 0.0;
  double confidence = 0.0;
  friend bool operator==(const LanePoint&, const LanePoint&) = default;
};

/// One video frame of per-lane confidence maps. Every channel has the same shape.
struct ProbMapFrame {
  std::int64_t frame_id = 0;
  int width = 0;
  int height = 0;
  std::vector<ConfidenceGrid> channels;
  /// Channels flagged by the detector head as potential active-lane markings.
  std::vector<bool> active_hints;

  [[nodiscard]] bool active_hint(std::size_t channel) const {
    return channel < active_hints.size() && active_hints[channel];
  }
};

/// Pair of indices into GroundTruthFrame::lanes.
struct ActivePair {
  std::size_t left = 0;
  std::size_t right = 0;
  friend bool operator==(const ActivePair&, const ActivePair&) = default;
};

struct GroundTruthFrame {
  std::int64_t frame_id = 0;
  std::vector<Polyline> lanes;  // each ordered bottom-to-top (decreasing y)
  std::optional<ActivePair> active_pair;
};

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

}  // namespace lanekit
