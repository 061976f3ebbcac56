#include "lanekit/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lanekit {

std::vector<double> EvalConfig::default_thresholds() {
  std::vector<double> t;
  for (int i = 30; i <= 50; ++i) t.push_back(i / 100.0);
  return t;
}

void EvalConfig::validate() const {
  if (!(eval_width > 0.0) || !(gt_line_width > 0.0) || !(pred_line_width > 0.0)) {
    throw std::invalid_argument("eval: widths must be positive");
  }
  if (thresholds.empty() || !std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("eval: thresholds must be non-empty and ascending");
  }
}

namespace {

double segment_distance_sq(double px, double py, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0);
  const double ex = a.x + t * dx - px;
  const double ey = a.y + t * dy - py;
  return ex * ex + ey * ey;
}

}  // namespace

Mask rasterize_polyline(std::span<const Point2> points, double width, int canvas_w, int canvas_h) {
  if (points.size() < 2) throw std::invalid_argument("rasterize_polyline: need at least two points");
  Mask mask = Mask::Zero(canvas_h, canvas_w);
  const double r = width / 2.0;
  const double r2 = r * r;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Point2& a = points[i];
    const Point2& b = points[i + 1];
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - r)));
    const int x1 = std::min(canvas_w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
    const int y1 = std::min(canvas_h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!mask(y, x) && segment_distance_sq(x, y, a, b) <= r2) mask(y, x) = 1;
      }
    }
  }
  return mask;
}

double mask_iou(const Mask& a, const Mask& b) {
  const auto inter = (a.cast<int>() * b.cast<int>()).sum();
  const auto uni = (a.cast<int>().max(b.cast<int>())).sum();
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double lane_iou(std::span<const Point2> pred, std::span<const Point2> gt, const EvalConfig& cfg, int frame_w,
                int frame_h) {
  const double scale = frame_w / cfg.eval_width;
  return mask_iou(rasterize_polyline(pred, cfg.pred_line_width * scale, frame_w, frame_h),
                  rasterize_polyline(gt, cfg.gt_line_width * scale, frame_w, frame_h));
}

double EvalReport::accuracy_at(double t) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - t) < std::abs(thresholds[best] - t)) best = i;
  }
  return accuracy.at(best);
}

EvalReport evaluate(std::span<const PredictionFrame> preds, std::span<const GroundTruthFrame> gts,
                    const EvalConfig& cfg) {
  cfg.validate();
  if (preds.size() != gts.size()) {
    throw FrameAlignmentError("prediction/ground-truth frame counts differ (" + std::to_string(preds.size()) +
                              " vs " + std::to_string(gts.size()) + ")");
  }
  EvalReport report;
  report.thresholds = cfg.thresholds;
  report.true_positives.assign(cfg.thresholds.size(), 0);

  std::vector<double> ious;
  for (std::size_t f = 0; f < gts.size(); ++f) {
    const auto& gt = gts[f];
    const auto& pred = preds[f];
    if (pred.frame_id != gt.frame_id) {
      throw FrameAlignmentError("frame id mismatch at position " + std::to_string(f) + ": prediction " +
                                std::to_string(pred.frame_id) + ", ground truth " + std::to_string(gt.frame_id));
    }
    if (!gt.active_pair) {
      ++report.skipped_frames;
      continue;
    }
    FrameEval fe{gt.frame_id, std::nullopt, std::nullopt};
    auto side_iou = [&](const Polyline& gt_lane, const std::optional<Polyline>& p) {
      if (!p || p->size() < 2) return 0.0;
      return lane_iou(*p, gt_lane, cfg, pred.width, pred.height);
    };
    fe.left_iou = side_iou(gt.lanes.at(gt.active_pair->left), pred.left);
    fe.right_iou = side_iou(gt.lanes.at(gt.active_pair->right), pred.right);
    ious.push_back(*fe.left_iou);
    ious.push_back(*fe.right_iou);
    report.frames.push_back(fe);
  }

  report.ground_truth_lanes = ious.size();
  for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
    for (double v : ious) report.true_positives[t] += v > cfg.thresholds[t] ? 1 : 0;
  }
  for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
    report.accuracy.push_back(report.ground_truth_lanes == 0
                                  ? 0.0
                                  : static_cast<double>(report.true_positives[t]) /
                                        static_cast<double>(report.ground_truth_lanes));
  }
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["ground_truth_lanes"] = ground_truth_lanes;
  j["skipped_frames"] = skipped_frames;
  j["thresholds"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    j["thresholds"].push_back(
        {{"threshold", thresholds[i]}, {"true_positives", true_positives[i]}, {"ground_truth", ground_truth_lanes},
         {"accuracy", accuracy[i]}});
  }
  j["frames"] = nlohmann::ordered_json::array();
  for (const auto& f : frames) {
    nlohmann::ordered_json fj;
    fj["frame_id"] = f.frame_id;
    fj["left_iou"] = f.left_iou ? nlohmann::ordered_json(*f.left_iou) : nlohmann::ordered_json(nullptr);
    fj["right_iou"] = f.right_iou ? nlohmann::ordered_json(*f.right_iou) : nlohmann::ordered_json(nullptr);
    j["frames"].push_back(fj);
  }
  return j.dump(2) + "\n";
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "threshold,true_positives,ground_truth,accuracy\n";
  out.setf(std::ios::fixed);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    out.precision(2);
    out << thresholds[i] << ',' << true_positives[i] << ',' << ground_truth_lanes << ',';
    out.precision(6);
    out << accuracy[i] << '\n';
  }
  return out.str();
}

std::vector<LaneMarking> baseline_decode(const ProbMapFrame& frame, const BaselineConfig& cfg) {
  std::vector<LaneMarking> lanes;
  const int h = frame.height;
  for (std::size_t c = 0; c < frame.channels.size(); ++c) {
    const auto& grid = frame.channels[c];
    std::vector<LanePoint> pts;
    for (int y = h - 1; y >= 0; y -= cfg.row_step) {
      Eigen::Index col = 0;
      const float best = grid.row(y).maxCoeff(&col);  // first maximum: smallest x
      if (best > cfg.threshold) pts.push_back({static_cast<double>(col), static_cast<double>(y), best});
    }
    if (pts.size() < 2) continue;
    LaneMarking lane;
    lane.shape = CubicSpline(pts);
    lane.y_top = pts.back().y;
    lane.y_bottom = static_cast<double>(h - 1);
    lane.points = std::move(pts);
    lane.channel_id = static_cast<int>(c);
    lane.active_hint = frame.active_hint(c);
    lanes.push_back(std::move(lane));
  }
  return lanes;
}

}  // namespace lanekit
