#pragma once

#include "lanekit/config.hpp"
#include "lanekit/evaluation.hpp"
#include "lanekit/probmap_io.hpp"
#include "lanekit/tracker.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace lanekit {

/// Per-stage wall time of one frame, microseconds.
struct StageTimings {
  double extract_us = 0.0;
  double classify_us = 0.0;
  double construct_us = 0.0;
  double track_us = 0.0;
  double select_us = 0.0;
  [[nodiscard]] double total_us() const { return extract_us + classify_us + construct_us + track_us + select_us; }
};

/// What happened to one channel in one frame.
struct ChannelReport {
  int channel = -1;
  std::size_t points = 0;
  LaneClass candidate = LaneClass::TooFewPoints;
  bool curved = false;    // constructed as a spline this frame
  bool dropped = false;   // no lane built from this channel
};

struct FrameResult {
  std::int64_t frame_id = 0;
  std::optional<LaneMarking> left;
  std::optional<LaneMarking> right;
  std::vector<LaneMarking> lanes;  // every lane constructed this frame
  std::vector<ChannelReport> channels;
  StageTimings timings;

  /// Active lanes sampled at every row of their extent, for evaluation.
  [[nodiscard]] PredictionFrame prediction(int width, int height) const;
  /// Active lanes in left, right order.
  [[nodiscard]] std::vector<LaneMarking> active_lanes() const;
};

/// One frame through extract -> classify -> construct -> match -> weigh -> select.
/// The tracker must belong to this frame's stream.
FrameResult process_frame(const ProbMapFrame& frame, LaneTracker& tracker, const PipelineConfig& cfg);

struct TimingStats {
  std::size_t samples = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p99_ms = 0.0;
  double stddev_ms = 0.0;
};

TimingStats timing_stats(std::vector<double> per_frame_ms);

struct RunOptions {
  bool overlays = false;
};

struct RunSummary {
  std::size_t frames = 0;
  std::size_t clips = 0;
  TimingStats timing;
  std::optional<EvalReport> eval;
};

/// Runs every manifest frame in order, resetting tracking at clip boundaries.
/// Writes lanes/<clip>_<frame>.json, timing.json, overlays/*.ppm when asked,
/// and eval.json/eval.csv when the manifest carries ground truth.
RunSummary run_dataset(const std::filesystem::path& manifest, const PipelineConfig& cfg,
                       const std::filesystem::path& out_dir, const RunOptions& opts = {});

/// Runs already-loaded clips and returns per-frame results (no I/O).
std::vector<FrameResult> run_clip(std::span<const ProbMapFrame> frames, const PipelineConfig& cfg);

struct BenchReport {
  std::size_t frames = 0;
  std::size_t repeats = 0;
  double mean_ms = 0.0;           // over all timed frames
  double repeat_stddev_ms = 0.0;  // spread of per-repeat means
  TimingStats per_frame;
};

/// Times process_frame over preloaded frames; warmup passes are not timed.
BenchReport bench_frames(std::span<const ProbMapFrame> frames, const PipelineConfig& cfg, std::size_t repeats,
                         std::size_t warmup = 1);
BenchReport bench(const std::filesystem::path& manifest, const PipelineConfig& cfg, std::size_t repeats,
                  std::size_t warmup = 1);

std::string clip_frame_name(const std::string& clip, std::int64_t frame_id);

}  // namespace lanekit
