#pragma once

// IoU-based lane accuracy.
//
// Lanes are rasterised as thick polylines (every pixel centre within width/2 of
// the polyline, so caps and joins are round). A prediction is a true positive
// at threshold t when its IoU with the ground-truth lane on the same side
// exceeds t; accuracy = N_TP / N_gt.

#include "lanekit/lane_model.hpp"
#include "lanekit/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lanekit {

struct EvalConfig {
  double eval_width = 800.0;     // reference output width the line widths refer to
  double gt_line_width = 16.0;
  double pred_line_width = 30.0;
  std::vector<double> thresholds = default_thresholds();

  static std::vector<double> default_thresholds();  // 0.30, 0.31, ..., 0.50
  void validate() const;
};

using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Pixels (x, y) with distance from (x, y) to the polyline <= width / 2.
/// Throws std::invalid_argument for fewer than two points.
Mask rasterize_polyline(std::span<const Point2> points, double width, int canvas_w, int canvas_h);

/// |A & B| / |A | B|; 0 when both are empty.
double mask_iou(const Mask& a, const Mask& b);

/// IoU of a prediction and a ground-truth lane with widths scaled by frame_w / eval_width.
double lane_iou(std::span<const Point2> pred, std::span<const Point2> gt, const EvalConfig& cfg, int frame_w,
                int frame_h);

struct PredictionFrame {
  std::int64_t frame_id = 0;
  int width = 0;
  int height = 0;
  std::optional<Polyline> left;
  std::optional<Polyline> right;
};

struct FrameEval {
  std::int64_t frame_id = 0;
  std::optional<double> left_iou;   // absent: no ground truth on that side
  std::optional<double> right_iou;  // 0 when ground truth exists but no prediction
};

struct EvalReport {
  std::vector<double> thresholds;
  std::vector<std::size_t> true_positives;
  std::size_t ground_truth_lanes = 0;
  std::vector<double> accuracy;
  std::vector<FrameEval> frames;
  std::size_t skipped_frames = 0;

  /// Accuracy at the threshold closest to t.
  [[nodiscard]] double accuracy_at(double t) const;
  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] std::string to_csv() const;
};

/// Frames must pair up by frame_id in order; frames whose ground truth has no
/// active pair are skipped. Throws FrameAlignmentError otherwise.
EvalReport evaluate(std::span<const PredictionFrame> preds, std::span<const GroundTruthFrame> gts,
                    const EvalConfig& cfg = {});

struct BaselineConfig {
  int row_step = 20;
  double threshold = 0.3;
};

/// Every row_step rows from the bottom, the argmax column of each channel is kept
/// when its confidence exceeds the threshold; kept points are joined by a
/// natural cubic spline in y. Channels with fewer than two kept rows yield no lane.
std::vector<LaneMarking> baseline_decode(const ProbMapFrame& frame, const BaselineConfig& cfg = {});

}  // namespace lanekit
