#pragma once

// Synthetic clips shared by the pipeline tests and the acceptance suite.

#include "lanekit/synth.hpp"

namespace fixture {

/// 20 frames, 800x288: two straight active lanes and a curved outer lane on the right.
inline lanekit::ScenarioSpec clean_clip(std::uint64_t seed = 0) {
  lanekit::ScenarioSpec s;
  s.frames = 20;
  s.width = 800;
  s.height = 288;
  s.lanes = {
      lanekit::SynthLane{250.0, 0.75, 0.0, 100.0, 0.4, 0.0},
      lanekit::SynthLane{560.0, -0.75, 0.0, 100.0, 0.4, 0.0},
      lanekit::SynthLane{770.0, -0.9, 0.003, 110.0, 0.0, 0.0},
  };
  s.active = lanekit::ActivePair{0, 1};
  s.seed = seed;
  return s;
}

inline constexpr int kCurvedLane = 2;

/// The clean clip with salt noise and the left active channel dropped on 5 frames.
inline lanekit::ScenarioSpec degraded_clip(std::uint64_t seed) {
  auto s = clean_clip(seed);
  s.salt_density = 0.002;
  s.salt_amplitude = 0.4;
  for (int f : {4, 7, 10, 13, 16}) s.dropout.insert({f, 0});
  return s;
}

}  // namespace fixture
