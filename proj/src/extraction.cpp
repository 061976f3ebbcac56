#include "lanekit/extraction.hpp"

#include <algorithm>
#include <optional>

namespace lanekit {

void ExtractionConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("extraction: alpha must be in (0, 1]");
  if (!(tau_min >= 0.0 && tau_min < 1.0)) throw std::invalid_argument("extraction: tau_min must be in [0, 1)");
  if (row_step_divisor < 1 || col_span_divisor < 1) throw std::invalid_argument("extraction: divisors must be >= 1");
  if (max_gap_windows < 0 || max_reseeds < 0) throw std::invalid_argument("extraction: negative gap/reseed limit");
}

double adaptive_threshold(const ConfidenceGrid& channel, const ExtractionConfig& cfg) {
  if (channel.size() == 0) return cfg.tau_min;
  return std::max(cfg.tau_min, cfg.alpha * static_cast<double>(channel.maxCoeff()));
}

namespace {

struct Cell {
  int x;
  int y;
  float c;
};

// Strongest salient cell in rows [y_lo, y_hi] and columns [x_lo, x_hi].
// Rows are visited top-down and columns left-right, so keeping the first
// strict maximum realises the smaller-y-then-smaller-x tie rule.
std::optional<Cell> best_in(const ConfidenceGrid& g, int y_lo, int y_hi, int x_lo, int x_hi, double thr) {
  std::optional<Cell> best;
  for (int y = y_lo; y <= y_hi; ++y) {
    const float* row = g.row(y).data();
    for (int x = x_lo; x <= x_hi; ++x) {
      const float c = row[x];
      if (c > thr && (!best || c > best->c)) best = Cell{x, y, c};
    }
  }
  return best;
}

// Bottom-most row at or above y_start that holds a salient cell; its strongest cell.
std::optional<Cell> seed_from(const ConfidenceGrid& g, int y_start, double thr) {
  const int w = static_cast<int>(g.cols());
  for (int y = y_start; y >= 0; --y) {
    if (auto c = best_in(g, y, y, 0, w - 1, thr)) return c;
  }
  return std::nullopt;
}

}  // namespace

std::vector<LanePoint> extract_lane_points(const ConfidenceGrid& channel, const ExtractionConfig& cfg) {
  std::vector<LanePoint> points;
  const int h = static_cast<int>(channel.rows());
  const int w = static_cast<int>(channel.cols());
  if (h == 0 || w == 0) return points;

  const double thr = adaptive_threshold(channel, cfg);
  const int win_h = std::max(1, h / cfg.row_step_divisor);
  const int half_w = std::max(0, (w / cfg.col_span_divisor) / 2);

  auto accept = [&](const Cell& c) { points.push_back({double(c.x), double(c.y), double(c.c)}); };

  auto seed = seed_from(channel, h - 1, thr);
  if (!seed) return points;
  accept(*seed);
  int reseeds = 0;
  Cell last = *seed;
  int scan_from = last.y;  // windows start at the row above this

  while (scan_from > 0) {
    const int x_lo = std::max(0, last.x - half_w);
    const int x_hi = std::min(w - 1, last.x + half_w);

    std::optional<Cell> found;
    int empty = 0;
    int top = scan_from;
    while (!found && top > 0 && empty <= cfg.max_gap_windows) {
      const int y_hi = top - 1;
      const int y_lo = std::max(0, top - win_h);
      found = best_in(channel, y_lo, y_hi, x_lo, x_hi, thr);
      if (!found) {
        ++empty;
        top = y_lo;
      }
    }

    if (found) {
      accept(*found);
      last = *found;
      scan_from = found->y;
      continue;
    }
    if (top <= 0 || reseeds >= cfg.max_reseeds) break;

    // Gap longer than max_gap_windows: resume from the next salient row above.
    auto again = seed_from(channel, top - 1, thr);
    if (!again) break;
    ++reseeds;
    accept(*again);
    last = *again;
    scan_from = again->y;
  }
  return points;
}

}  // namespace lanekit
