#include "lanekit/pipeline.hpp"

#include "lanekit/lane_output.hpp"
#include "lanekit/overlay.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace lanekit {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

LaneMarking to_marking(const TrackedLane& t, Side side) {
  LaneMarking m;
  m.shape = t.shape;
  m.channel_id = t.channel_id;
  m.active_hint = t.active_hint;
  m.y_top = t.y_top;
  m.y_bottom = t.y_bottom;
  m.side = side;
  return m;
}

// Lane under construction for one channel.
struct Candidate {
  std::vector<LanePoint> points;
  int channel = 0;
  bool curve_candidate = false;
  std::optional<StraightLine> line;
  std::optional<QuadraticSpline> spline;
  std::size_t report = 0;  // index into FrameResult::channels
};

void select_into(FrameResult& result, const LaneTracker& tracker, int w, int h) {
  const auto sel = select_active(tracker.tracked(), w, h);
  if (sel.left) result.left = to_marking(*sel.left, Side::Left);
  if (sel.right) result.right = to_marking(*sel.right, Side::Right);
}

FrameResult process_baseline(const ProbMapFrame& frame, LaneTracker& tracker, const PipelineConfig& cfg) {
  FrameResult result;
  result.frame_id = frame.frame_id;
  auto t0 = Clock::now();
  result.lanes = baseline_decode(frame, cfg.baseline);
  result.timings.extract_us = micros_since(t0);

  t0 = Clock::now();
  std::vector<Observation> obs;
  for (const auto& lane : result.lanes) obs.push_back({lane, false});
  // The comparison decoder has no memory: every frame starts from an empty tracker.
  tracker.reset();
  tracker.update(obs, Assignment{}, frame.width, frame.height);
  result.timings.track_us = micros_since(t0);

  t0 = Clock::now();
  select_into(result, tracker, frame.width, frame.height);
  result.timings.select_us = micros_since(t0);
  for (std::size_t c = 0; c < frame.channels.size(); ++c) {
    ChannelReport r{static_cast<int>(c), 0, LaneClass::TooFewPoints, false, true};
    for (const auto& l : result.lanes) {
      if (l.channel_id == static_cast<int>(c)) r = {r.channel, l.points.size(), LaneClass::CurvedCandidate, true, false};
    }
    result.channels.push_back(r);
  }
  return result;
}

}  // namespace

PredictionFrame FrameResult::prediction(int width, int height) const {
  PredictionFrame p{frame_id, width, height, std::nullopt, std::nullopt};
  if (left) p.left = left->sample_rows();
  if (right) p.right = right->sample_rows();
  return p;
}

std::vector<LaneMarking> FrameResult::active_lanes() const {
  std::vector<LaneMarking> out;
  if (left) out.push_back(*left);
  if (right) out.push_back(*right);
  return out;
}

FrameResult process_frame(const ProbMapFrame& frame, LaneTracker& tracker, const PipelineConfig& cfg) {
  if (cfg.mode == DecodeMode::Baseline) return process_baseline(frame, tracker, cfg);

  FrameResult result;
  result.frame_id = frame.frame_id;
  const int w = frame.width;
  const int h = frame.height;

  // Extraction, one marking per channel.
  auto t0 = Clock::now();
  std::vector<Candidate> cands;
  for (std::size_t c = 0; c < frame.channels.size(); ++c) {
    Candidate cand;
    cand.channel = static_cast<int>(c);
    cand.points = extract_lane_points(frame.channels[c], cfg.extraction);
    cand.report = result.channels.size();
    result.channels.push_back({cand.channel, cand.points.size(), LaneClass::TooFewPoints, false, true});
    cands.push_back(std::move(cand));
  }
  result.timings.extract_us = micros_since(t0);

  // Straight/curve candidacy.
  t0 = Clock::now();
  std::erase_if(cands, [&](Candidate& cand) {
    const LaneClass cls = classify(cand.points, cfg.classifier.n);
    result.channels[cand.report].candidate = cls;
    cand.curve_candidate = cls == LaneClass::CurvedCandidate;
    return cls == LaneClass::TooFewPoints;
  });
  result.timings.classify_us = micros_since(t0);

  // Tentative geometry: the spline for curve candidates, the straight fit for all.
  t0 = Clock::now();
  std::erase_if(cands, [&](Candidate& cand) {
    try {
      cand.line = fit_straight_line(cand.points, cfg.regression);
    } catch (const DegenerateFitError&) {
    }
    if (cand.curve_candidate) {
      try {
        cand.spline = QuadraticSpline(cand.points);
      } catch (const DataError&) {
      }
    }
    if (!cand.spline) cand.curve_candidate = false;
    return !cand.line && !cand.spline;
  });
  result.timings.construct_us = micros_since(t0);

  // Association against the tracked lanes, then curve corroboration.
  t0 = Clock::now();
  const bool memory = cfg.tracker.pft_enabled;
  Assignment assignment;
  if (memory) {
    std::vector<LaneShape> current;
    std::vector<LaneShape> tracked;
    for (const auto& cand : cands) current.push_back(cand.line ? LaneShape(*cand.line) : LaneShape(*cand.spline));
    for (const auto& t : tracker.tracked()) tracked.push_back(t.association_shape());
    assignment = match_shapes(current, tracked, w, h, cfg.tracker.match_tol_divisor);
  }

  std::vector<Observation> observations;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    Candidate& cand = cands[i];
    bool curved = cand.curve_candidate;
    if (memory) {
      std::vector<bool> history;
      if (auto j = assignment.tracked_for(i)) {
        const auto& h_deque = tracker.tracked()[*j].curve_history;
        history.assign(h_deque.begin(), h_deque.end());
      }
      curved = corroborate_curve(cand.curve_candidate, history, cfg.classifier.k, cfg.classifier.window);
    }
    if (!curved && !cand.line) curved = true;  // only the spline could be built

    LaneMarking lane;
    lane.shape = curved ? LaneShape(*cand.spline) : LaneShape(*cand.line);
    lane.line_fit = cand.line;
    lane.channel_id = cand.channel;
    lane.active_hint = frame.active_hint(static_cast<std::size_t>(cand.channel));
    lane.y_top = std::min_element(cand.points.begin(), cand.points.end(), [](const auto& a, const auto& b) {
                   return a.y < b.y;
                 })->y;
    lane.y_bottom = static_cast<double>(h - 1);
    lane.points = std::move(cand.points);

    auto& report = result.channels[cand.report];
    report.curved = curved;
    report.dropped = false;
    observations.push_back({lane, cand.curve_candidate});
    result.lanes.push_back(std::move(lane));
  }
  tracker.update(observations, assignment, w, h);
  result.timings.track_us = micros_since(t0);

  t0 = Clock::now();
  select_into(result, tracker, w, h);
  result.timings.select_us = micros_since(t0);
  return result;
}

TimingStats timing_stats(std::vector<double> ms) {
  TimingStats s;
  s.samples = ms.size();
  if (ms.empty()) return s;
  std::sort(ms.begin(), ms.end());
  s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  auto pct = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(ms.size()))) ;
    return ms[std::min(ms.size() - 1, idx == 0 ? 0 : idx - 1)];
  };
  s.p50_ms = pct(0.50);
  s.p99_ms = pct(0.99);
  double var = 0.0;
  for (double v : ms) var += (v - s.mean_ms) * (v - s.mean_ms);
  s.stddev_ms = ms.size() > 1 ? std::sqrt(var / static_cast<double>(ms.size() - 1)) : 0.0;
  return s;
}

std::string clip_frame_name(const std::string& clip, std::int64_t frame_id) {
  std::ostringstream name;
  name << (clip.empty() ? "frame" : clip) << '_' << std::setw(5) << std::setfill('0') << frame_id;
  return name.str();
}

std::vector<FrameResult> run_clip(std::span<const ProbMapFrame> frames, const PipelineConfig& cfg) {
  LaneTracker tracker(cfg.tracker);
  std::vector<FrameResult> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(process_frame(f, tracker, cfg));
  return out;
}

namespace {

nlohmann::ordered_json timing_json(const TimingStats& s) {
  return {{"samples", s.samples}, {"mean_ms", s.mean_ms}, {"p50_ms", s.p50_ms}, {"p99_ms", s.p99_ms},
          {"stddev_ms", s.stddev_ms}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

RunSummary run_dataset(const fs::path& manifest, const PipelineConfig& cfg, const fs::path& out_dir,
                       const RunOptions& opts) {
  cfg.validate();
  const auto entries = read_manifest(manifest);
  fs::create_directories(out_dir / "lanes");
  if (opts.overlays) fs::create_directories(out_dir / "overlays");

  RunSummary summary;
  LaneTracker tracker(cfg.tracker);
  std::optional<std::string> clip;
  int clip_w = 0;
  int clip_h = 0;
  std::vector<double> frame_ms;
  std::vector<PredictionFrame> preds;
  std::vector<GroundTruthFrame> gts;

  for (const auto& entry : entries) {
    const ProbMapFrame frame = load_entry(entry);
    if (!clip || *clip != entry.clip) {
      tracker.reset();
      clip = entry.clip;
      clip_w = frame.width;
      clip_h = frame.height;
      ++summary.clips;
    } else if (frame.width != clip_w || frame.height != clip_h) {
      throw DataError("frame " + std::to_string(entry.frame_id) + ": dimensions differ within clip '" + entry.clip +
                      "'");
    }

    const FrameResult result = process_frame(frame, tracker, cfg);
    frame_ms.push_back(result.timings.total_us() / 1000.0);
    ++summary.frames;

    const std::string name = clip_frame_name(entry.clip, entry.frame_id);
    const auto lanes = result.active_lanes();
    write_lane_output(lanes, out_dir / "lanes" / (name + ".json"), LaneOutputOptions{entry.frame_id, {}});

    if (opts.overlays) {
      RgbImage img = entry.background ? RgbImage::load(*entry.background) : RgbImage::blank(frame.width, frame.height);
      if (img.width != frame.width || img.height != frame.height) {
        throw DataError("background size differs from frame " + std::to_string(entry.frame_id));
      }
      if (result.left) img.draw(result.left->sample_rows(), {0, 255, 0}, 3.0);
      if (result.right) img.draw(result.right->sample_rows(), {255, 64, 64}, 3.0);
      img.save_ppm(out_dir / "overlays" / (name + ".ppm"));
    }

    if (entry.ground_truth) {
      preds.push_back(result.prediction(frame.width, frame.height));
      gts.push_back(load_entry_ground_truth(entry));
    }
  }

  summary.timing = timing_stats(frame_ms);
  nlohmann::ordered_json tj;
  tj["frames"] = summary.frames;
  tj["clips"] = summary.clips;
  tj["per_frame"] = timing_json(summary.timing);
  write_text(out_dir / "timing.json", tj.dump(2) + "\n");

  if (!gts.empty()) {
    summary.eval = evaluate(preds, gts, cfg.eval);
    write_text(out_dir / "eval.json", summary.eval->to_json());
    write_text(out_dir / "eval.csv", summary.eval->to_csv());
  }
  return summary;
}

BenchReport bench_frames(std::span<const ProbMapFrame> frames, const PipelineConfig& cfg, std::size_t repeats,
                         std::size_t warmup) {
  BenchReport report;
  report.frames = frames.size();
  report.repeats = repeats;
  for (std::size_t r = 0; r < warmup; ++r) run_clip(frames, cfg);

  std::vector<double> all_ms;
  std::vector<double> repeat_means;
  for (std::size_t r = 0; r < repeats; ++r) {
    LaneTracker tracker(cfg.tracker);
    double sum = 0.0;
    for (const auto& f : frames) {
      const auto t0 = Clock::now();
      const FrameResult res = process_frame(f, tracker, cfg);
      const double ms = micros_since(t0) / 1000.0;
      all_ms.push_back(ms);
      sum += ms;
    }
    repeat_means.push_back(frames.empty() ? 0.0 : sum / static_cast<double>(frames.size()));
  }
  report.per_frame = timing_stats(all_ms);
  report.mean_ms = report.per_frame.mean_ms;
  report.repeat_stddev_ms = timing_stats(repeat_means).stddev_ms;
  return report;
}

BenchReport bench(const fs::path& manifest, const PipelineConfig& cfg, std::size_t repeats, std::size_t warmup) {
  cfg.validate();
  std::vector<ProbMapFrame> frames;
  for (const auto& e : read_manifest(manifest)) frames.push_back(load_entry(e));
  return bench_frames(frames, cfg, repeats, warmup);
}

}  // namespace lanekit
