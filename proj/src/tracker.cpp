#include "lanekit/tracker.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace lanekit {

void TrackerConfig::validate() const {
  if (!(psi_inactive > 0.0) || psi_active < psi_inactive) {
    throw std::invalid_argument("tracker: require psi_active >= psi_inactive > 0");
  }
  if (match_tol_divisor < 1) throw std::invalid_argument("tracker: match_tol_divisor must be >= 1");
  if (max_miss < 0) throw std::invalid_argument("tracker: max_miss must be >= 0");
}

double zeta(const LaneShape& a, const LaneShape& b, int h) {
  const auto* la = std::get_if<StraightLine>(&a);
  const auto* lb = std::get_if<StraightLine>(&b);
  if (la && lb) {
    return rms_x_distance(la->slope(), la->offset(), lb->slope(), lb->offset(), static_cast<double>(h));
  }
  if (h <= 0) return 0.0;
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    const double d = lane_x(a, y) - lane_x(b, y);
    sum += d * d;
  }
  return std::sqrt(sum / h);
}

std::optional<std::size_t> Assignment::tracked_for(std::size_t current) const {
  for (const auto& m : matches) {
    if (m.current == current) return m.tracked;
  }
  return std::nullopt;
}

Assignment assign_greedy(const Eigen::MatrixXd& cost, double tol) {
  std::vector<Match> candidates;
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (cost(i, j) <= tol) {
        candidates.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), cost(i, j)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    return std::tie(a.zeta, a.current, a.tracked) < std::tie(b.zeta, b.current, b.tracked);
  });

  Assignment out;
  std::vector<bool> cur_used(static_cast<std::size_t>(cost.rows()), false);
  std::vector<bool> trk_used(static_cast<std::size_t>(cost.cols()), false);
  for (const auto& c : candidates) {
    if (cur_used[c.current] || trk_used[c.tracked]) continue;
    cur_used[c.current] = trk_used[c.tracked] = true;
    out.matches.push_back(c);
  }
  for (std::size_t i = 0; i < cur_used.size(); ++i) {
    if (!cur_used[i]) out.unmatched_current.push_back(i);
  }
  for (std::size_t j = 0; j < trk_used.size(); ++j) {
    if (!trk_used[j]) out.unmatched_tracked.push_back(j);
  }
  return out;
}

Eigen::MatrixXd zeta_matrix(std::span<const LaneShape> current, std::span<const LaneShape> tracked, int h) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(current.size()), static_cast<Eigen::Index>(tracked.size()));
  for (std::size_t i = 0; i < current.size(); ++i) {
    for (std::size_t j = 0; j < tracked.size(); ++j) {
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = zeta(current[i], tracked[j], h);
    }
  }
  return z;
}

Assignment match_shapes(std::span<const LaneShape> current, std::span<const LaneShape> tracked, int w, int h,
                        int match_tol_divisor) {
  return assign_greedy(zeta_matrix(current, tracked, h), static_cast<double>(w) / match_tol_divisor);
}

Assignment match_lanes(std::span<const LaneMarking> current, std::span<const TrackedLane> tracked, int w, int h,
                       int match_tol_divisor) {
  std::vector<LaneShape> cur;
  std::vector<LaneShape> trk;
  cur.reserve(current.size());
  trk.reserve(tracked.size());
  for (const auto& l : current) cur.push_back(l.association_shape());
  for (const auto& t : tracked) trk.push_back(t.association_shape());
  return match_shapes(cur, trk, w, h, match_tol_divisor);
}

double rms_confidence(std::span<const LanePoint> points) {
  if (points.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : points) s += p.confidence * p.confidence;
  return std::sqrt(s / static_cast<double>(points.size()));
}

void update_weights(std::vector<TrackedLane>& tracked, const TrackerConfig& cfg) {
  static const double decay = std::exp(-1.0);
  for (auto& t : tracked) {
    if (t.miss_count == 0) {
      const double psi = t.active_hint ? cfg.psi_active : cfg.psi_inactive;
      t.weight += psi * t.rms_confidence * static_cast<double>(t.point_count);
    } else {
      t.weight *= decay;
    }
  }
  std::erase_if(tracked, [&](const TrackedLane& t) { return t.miss_count > cfg.max_miss; });
}

Side side_of(const LaneShape& shape, int w, int h) {
  const double x = lane_x(shape, static_cast<double>(h - 1));
  return x >= static_cast<double>(w) / 2.0 ? Side::Right : Side::Left;
}

ActiveSelection select_active(std::span<const TrackedLane> tracked, int w, int h) {
  ActiveSelection sel;
  for (const auto& t : tracked) {
    auto& slot = side_of(t.shape, w, h) == Side::Left ? sel.left : sel.right;
    if (!slot || t.weight > slot->weight || (t.weight == slot->weight && t.lane_id < slot->lane_id)) {
      slot = t;
    }
  }
  if (sel.left) sel.left->side = Side::Left;
  if (sel.right) sel.right->side = Side::Right;
  return sel;
}

void LaneTracker::reset() {
  lanes_.clear();
  next_id_ = 0;
  frames_ = 0;
}

void LaneTracker::update(std::span<const Observation> observations, const Assignment& assignment, int w, int h) {
  ++frames_;
  if (!cfg_.pft_enabled) lanes_.clear();

  const std::size_t window = std::max<std::size_t>(1, cfg_.curve_history_length);
  auto absorb = [&](TrackedLane& t, const Observation& obs) {
    t.shape = obs.lane.shape;
    t.line_fit = obs.lane.line_fit;
    t.y_top = obs.lane.y_top;
    t.y_bottom = obs.lane.y_bottom;
    t.miss_count = 0;
    t.rms_confidence = rms_confidence(obs.lane.points);
    t.point_count = obs.lane.points.size();
    t.active_hint = obs.lane.active_hint;
    t.channel_id = obs.lane.channel_id;
    t.side = side_of(t.shape, w, h);
    t.curve_history.push_back(obs.curve_candidate);
    while (t.curve_history.size() > window) t.curve_history.pop_front();
  };

  std::vector<bool> matched(lanes_.size(), false);
  if (cfg_.pft_enabled) {
    for (const auto& m : assignment.matches) {
      absorb(lanes_.at(m.tracked), observations[m.current]);
      matched[m.tracked] = true;
    }
  }
  for (std::size_t j = 0; j < lanes_.size(); ++j) {
    if (!matched[j]) ++lanes_[j].miss_count;
  }

  for (std::size_t i = 0; i < observations.size(); ++i) {
    const bool is_new = !cfg_.pft_enabled || !assignment.tracked_for(i).has_value();
    if (!is_new) continue;
    TrackedLane t;
    t.lane_id = next_id_++;
    absorb(t, observations[i]);
    lanes_.push_back(std::move(t));
  }

  update_weights(lanes_, cfg_);
}

std::string LaneTracker::snapshot() const {
  nlohmann::ordered_json j;
  j["frames_seen"] = frames_;
  j["lanes"] = nlohmann::ordered_json::array();
  for (const auto& t : lanes_) {
    nlohmann::ordered_json l;
    l["lane_id"] = t.lane_id;
    l["kind"] = std::holds_alternative<StraightLine>(t.shape) ? "straight" : "curved";
    if (const auto* s = std::get_if<StraightLine>(&t.shape)) {
      if (s->vertical_x) {
        l["vertical_x"] = *s->vertical_x;
      } else {
        l["beta0"] = s->beta0;
        l["beta1"] = s->beta1;
      }
    }
    l["weight"] = t.weight;
    l["miss_count"] = t.miss_count;
    l["rms_confidence"] = t.rms_confidence;
    l["point_count"] = t.point_count;
    l["side"] = to_string(t.side);
    l["active_hint"] = t.active_hint;
    l["channel"] = t.channel_id;
    auto hist = nlohmann::ordered_json::array();
    for (bool b : t.curve_history) hist.push_back(b);
    l["curve_history"] = hist;
    j["lanes"].push_back(l);
  }
  return j.dump(2);
}

}  // namespace lanekit
