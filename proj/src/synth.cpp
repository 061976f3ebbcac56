#include "lanekit/synth.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace lanekit {

namespace fs = std::filesystem;

double SynthLane::x_at(double y, int frame, int h) const {
  const double u = (h - 1) - y;
  return x_bottom + frame * x_drift + (slope + frame * slope_drift) * u + curvature * u * u;
}

void ScenarioSpec::validate() const {
  if (frames < 1 || width < 1 || height < 1) throw std::invalid_argument("scenario: empty geometry");
  if (salt_density < 0.0 || salt_density > 1.0 || salt_amplitude < 0.0 || salt_amplitude > 1.0) {
    throw std::invalid_argument("scenario: salt density/amplitude must be in [0, 1]");
  }
  if (peak_confidence < 0.0 || peak_confidence > 1.0) throw std::invalid_argument("scenario: bad peak confidence");
  if (!(blur_sigma > 0.0)) throw std::invalid_argument("scenario: blur_sigma must be positive");
  for (const auto& [f, l] : dropout) {
    if (f < 0 || f >= frames || l < 0 || static_cast<std::size_t>(l) >= lanes.size()) {
      throw std::invalid_argument("scenario: dropout refers to a missing frame or lane");
    }
  }
  if (active && (active->left >= lanes.size() || active->right >= lanes.size())) {
    throw std::invalid_argument("scenario: active pair refers to a missing lane");
  }
}

SeededRng seeded_rng(std::uint64_t seed) { return SeededRng(seed); }

Scenario render_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Scenario out;
  SeededRng rng(spec.seed);
  const int w = spec.width;
  const int h = spec.height;
  const double sigma = spec.blur_sigma;
  const int reach = static_cast<int>(std::ceil(4.0 * sigma));

  for (int f = 0; f < spec.frames; ++f) {
    ProbMapFrame frame;
    frame.frame_id = f;
    frame.width = w;
    frame.height = h;
    GroundTruthFrame gt;
    gt.frame_id = f;
    gt.active_pair = spec.active;

    for (std::size_t k = 0; k < spec.lanes.size(); ++k) {
      const SynthLane& lane = spec.lanes[k];
      ConfidenceGrid grid = ConfidenceGrid::Zero(h, w);
      Polyline truth;
      const int top = std::max(0, static_cast<int>(std::ceil(lane.y_top)));
      for (int y = h - 1; y >= top; --y) {
        const double xc = lane.x_at(y, f, h);
        truth.push_back({xc, static_cast<double>(y)});
        const int lo = std::max(0, static_cast<int>(std::floor(xc)) - reach);
        const int hi = std::min(w - 1, static_cast<int>(std::ceil(xc)) + reach);
        for (int x = lo; x <= hi; ++x) {
          const double d = x - xc;
          const auto v = static_cast<float>(spec.peak_confidence * std::exp(-d * d / (2.0 * sigma * sigma)));
          grid(y, x) = std::max(grid(y, x), v);
        }
      }
      gt.lanes.push_back(std::move(truth));

      // Salt is drawn for every channel so the stream does not depend on dropout.
      if (spec.salt_density > 0.0) {
        const auto amp = static_cast<float>(spec.salt_amplitude);
        float* cells = grid.data();
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          if (rng.uniform() < spec.salt_density) cells[i] = std::max(cells[i], amp);
        }
      }
      if (spec.dropout.count({f, static_cast<int>(k)})) grid.setZero();
      frame.channels.push_back(std::move(grid));
    }
    frame.active_hints.assign(spec.lanes.size(), false);
    if (spec.active) {
      frame.active_hints[spec.active->left] = true;
      frame.active_hints[spec.active->right] = true;
    }
    out.frames.push_back(std::move(frame));
    out.ground_truth.push_back(std::move(gt));
  }
  return out;
}

fs::path write_scenario(const Scenario& scenario, const fs::path& dir, const std::string& clip) {
  fs::create_directories(dir / "maps");
  fs::create_directories(dir / "gt");
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < scenario.frames.size(); ++i) {
    const auto& frame = scenario.frames[i];
    std::ostringstream name;
    name << std::setw(5) << std::setfill('0') << frame.frame_id;
    const fs::path map_rel = fs::path("maps") / (clip + "_" + name.str() + ".rnld");
    const fs::path gt_rel = fs::path("gt") / (clip + "_" + name.str() + ".lines.txt");
    write_raw_f32(frame, dir / map_rel);
    write_lines_txt(scenario.ground_truth.at(i), dir / gt_rel);

    ManifestEntry e;
    e.frame_id = frame.frame_id;
    e.maps.push_back(map_rel);
    e.clip = clip;
    e.ground_truth = gt_rel;
    for (std::size_t c = 0; c < frame.active_hints.size(); ++c) {
      if (frame.active_hints[c]) e.active_channels.push_back(static_cast<int>(c));
    }
    entries.push_back(std::move(e));
  }
  const fs::path manifest = dir / "manifest.txt";
  write_manifest(entries, manifest);
  return manifest;
}

ScenarioSpec default_scenario(std::uint64_t seed) {
  ScenarioSpec s;
  s.seed = seed;
  // Four markings as seen from the ego lane: outer left, ego left, ego right, outer right.
  s.lanes = {
      SynthLane{40.0, 1.6, 0.0, 110.0, 0.0, 0.0},
      SynthLane{250.0, 0.75, 0.0, 100.0, 0.0, 0.0},
      SynthLane{560.0, -0.75, 0.0, 100.0, 0.0, 0.0},
      SynthLane{760.0, -1.6, 0.0, 110.0, 0.0, 0.0},
  };
  s.active = ActivePair{1, 2};
  return s;
}

}  // namespace lanekit
