#pragma once

// Synthetic probability-map clips with analytic ground truth.
//
// Lane k occupies channel k. In frame f its centre line is
//
//   x(y) = x_bottom + f * x_drift + (slope + f * slope_drift) * u + curvature * u^2,
//   u = (h - 1) - y,
//
// for rows y_top <= y <= h - 1, rendered as a Gaussian ridge across x.

#include "lanekit/probmap_io.hpp"
#include "lanekit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace lanekit {

struct SynthLane {
  double x_bottom = 400.0;
  double slope = 0.0;       // dx per row moving up the image
  double curvature = 0.0;   // dx per row^2 moving up the image
  double y_top = 100.0;
  double x_drift = 0.0;     // per frame
  double slope_drift = 0.0; // per frame

  [[nodiscard]] double x_at(double y, int frame, int h) const;
};

struct ScenarioSpec {
  int frames = 20;
  int width = 800;
  int height = 288;
  std::vector<SynthLane> lanes;
  std::optional<ActivePair> active;  // lane indices of the left/right active markings
  double salt_density = 0.0;
  double salt_amplitude = 0.0;
  std::set<std::pair<int, int>> dropout;  // (frame, lane)
  double blur_sigma = 1.5;
  double peak_confidence = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic stream: mt19937_64 seeded with the given value. Floating-point
/// draws are built from raw 64-bit outputs so they do not depend on the
/// standard library's distribution implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

SeededRng seeded_rng(std::uint64_t seed);

struct Scenario {
  std::vector<ProbMapFrame> frames;
  std::vector<GroundTruthFrame> ground_truth;
};

Scenario render_scenario(const ScenarioSpec& spec);

/// Writes frames as RawF32, ground truth as LinesTxt and a manifest naming both.
/// Returns the manifest path.
std::filesystem::path write_scenario(const Scenario& scenario, const std::filesystem::path& dir,
                                     const std::string& clip = "clip0");

/// Desk-scale default clip: 800x288, four channels, 20 frames, channels 1 and 2 active.
ScenarioSpec default_scenario(std::uint64_t seed = 0);

}  // namespace lanekit
