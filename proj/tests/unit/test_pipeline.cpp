#include "lanekit/pipeline.hpp"

#include "lanekit/lane_output.hpp"
#include "lanekit/synth.hpp"

#include "../fixtures.hpp"
#include "tmpdir.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace lanekit;

namespace {

double rms_to_truth(const LaneMarking& lane, const Polyline& truth) {
  double s = 0.0;
  for (const auto& p : truth) {
    const double d = lane.x_at(p.y) - p.x;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(truth.size()));
}

ScenarioSpec straight_pair() {
  auto s = fixture::clean_clip();
  s.lanes.pop_back();
  s.frames = 6;
  return s;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("clean straight frame lands on the analytic lanes") {
  const auto scn = render_scenario(straight_pair());
  LaneTracker tracker;
  const auto res = process_frame(scn.frames[0], tracker, PipelineConfig{});
  REQUIRE(res.left);
  REQUIRE(res.right);
  CHECK(res.left->channel_id == 0);
  CHECK(res.right->channel_id == 1);
  CHECK(rms_to_truth(*res.left, scn.ground_truth[0].lanes[0]) < 2.0);
  CHECK(rms_to_truth(*res.right, scn.ground_truth[0].lanes[1]) < 2.0);
  const auto pred = res.prediction(800, 288);
  REQUIRE(pred.left);
  CHECK(pred.left->front().y == 287);
  CHECK(pred.left->back().y == 100);
  CHECK(res.timings.total_us() > 0.0);
}

TEST_CASE("curved lane is built as a spline once corroborated") {
  const auto scn = render_scenario(fixture::clean_clip());
  const auto results = run_clip(scn.frames, PipelineConfig{});
  int first_curved = -1;
  for (std::size_t f = 0; f < results.size(); ++f) {
    const auto& ch = results[f].channels.at(fixture::kCurvedLane);
    CHECK(ch.candidate == LaneClass::CurvedCandidate);
    if (ch.curved && first_curved < 0) first_curved = static_cast<int>(f);
    if (first_curved >= 0) CHECK(ch.curved);
  }
  CHECK(first_curved >= 1);  // never on the first sighting
  CHECK(first_curved <= 2);
  CHECK_FALSE(results[0].channels[fixture::kCurvedLane].curved);
  // Without memory the candidate is used directly.
  PipelineConfig memoryless;
  memoryless.tracker.pft_enabled = false;
  CHECK(run_clip(scn.frames, memoryless)[0].channels[fixture::kCurvedLane].curved);
}

TEST_CASE("dropped lane is carried from memory") {
  auto spec = straight_pair();
  spec.dropout = {{4, 0}};
  const auto scn = render_scenario(spec);

  const auto with = run_clip(scn.frames, PipelineConfig{});
  REQUIRE(with[4].left);
  CHECK(with[4].channels[0].dropped);
  CHECK(rms_to_truth(*with[4].left, scn.ground_truth[4].lanes[0]) < 3.0);

  PipelineConfig off;
  off.tracker.pft_enabled = false;
  const auto without = run_clip(scn.frames, off);
  CHECK_FALSE(without[4].left);
  CHECK(without[4].right);
  CHECK(without[5].left);

  // The stale lane still outweighs nothing at all; its weight decayed by e^-1.
  LaneTracker tr;
  for (int f = 0; f < 4; ++f) process_frame(scn.frames[f], tr, PipelineConfig{});
  const double before = tr.tracked()[0].weight;
  process_frame(scn.frames[4], tr, PipelineConfig{});
  CHECK(tr.tracked()[0].miss_count == 1);
  CHECK(tr.tracked()[0].weight == doctest::Approx(before * std::exp(-1.0)));
}

TEST_CASE("memoryless output depends only on the current frame") {
  const auto scn = render_scenario(fixture::degraded_clip(3));
  PipelineConfig off;
  off.tracker.pft_enabled = false;
  const auto seq = run_clip(scn.frames, off);
  for (std::size_t f : {0u, 7u, 19u}) {
    const auto alone = run_clip(std::span(scn.frames).subspan(f, 1), off);
    CHECK(format_lane_output(alone[0].active_lanes()) == format_lane_output(seq[f].active_lanes()));
  }
}

TEST_CASE("an empty frame decays weights and keeps remembered lanes") {
  const auto scn = render_scenario(straight_pair());
  LaneTracker tr;
  process_frame(scn.frames[0], tr, PipelineConfig{});
  ProbMapFrame blank = scn.frames[1];
  for (auto& c : blank.channels) c.setZero();
  const auto res = process_frame(blank, tr, PipelineConfig{});
  CHECK(res.lanes.empty());
  CHECK(res.left);
  CHECK(res.right);
  for (const auto& t : tr.tracked()) CHECK(t.miss_count == 1);
}

TEST_CASE("baseline mode") {
  const auto scn = render_scenario(straight_pair());
  PipelineConfig cfg;
  cfg.mode = DecodeMode::Baseline;
  const auto res = run_clip(scn.frames, cfg);
  REQUIRE(res[0].left);
  REQUIRE(res[0].lanes.size() == 2);
  CHECK(res[0].lanes[0].points.size() == 10);
  CHECK(std::holds_alternative<CubicSpline>(res[0].left->shape));
  CHECK(rms_to_truth(*res[0].left, scn.ground_truth[0].lanes[0]) < 3.0);
  for (const auto& ch : res[0].channels) CHECK_FALSE(ch.dropped);
}

TEST_CASE("run_dataset writes one lane file per frame") {
  TempDir dir;
  const auto scn = render_scenario(fixture::clean_clip());
  const auto manifest = write_scenario(scn, dir / "data", "clean");
  const auto summary = run_dataset(manifest, PipelineConfig{}, dir / "out", RunOptions{true});
  CHECK(summary.frames == 20);
  CHECK(summary.clips == 1);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "out" / "lanes")) files += e.is_regular_file();
  CHECK(files == 20);
  CHECK(std::filesystem::exists(dir / "out" / "overlays" / "clean_00019.ppm"));
  const auto timing = nlohmann::json::parse(read_file_text(dir / "out" / "timing.json"));
  CHECK(timing["per_frame"]["samples"] == 20);
  for (const char* k : {"mean_ms", "p50_ms", "p99_ms"}) CHECK(timing["per_frame"].contains(k));
  REQUIRE(summary.eval);
  CHECK(summary.eval->accuracy_at(0.5) == 1.0);
  CHECK(std::filesystem::exists(dir / "out" / "eval.csv"));

  const auto lanes = parse_lane_output(read_file_text(dir / "out" / "lanes" / "clean_00003.json"));
  CHECK(lanes.frame_id == 3);
  REQUIRE(lanes.lanes.size() == 2);
  CHECK(lanes.lanes[0].side == Side::Left);
}

TEST_CASE("tracking restarts at a clip boundary") {
  TempDir dir;
  auto a = straight_pair();
  auto b = straight_pair();
  b.frames = 2;
  b.dropout = {{0, 0}};
  const auto ma = write_scenario(render_scenario(a), dir / "a", "a");
  const auto mb = write_scenario(render_scenario(b), dir / "b", "b");
  auto entries = read_manifest(ma);
  for (const auto& e : read_manifest(mb)) entries.push_back(e);
  write_manifest(entries, dir / "both.txt");

  run_dataset(dir / "both.txt", PipelineConfig{}, dir / "out");
  // Clip b opens without its left lane; memory of clip a must not fill it in.
  const auto first_b = parse_lane_output(read_file_text(dir / "out" / "lanes" / "b_00000.json"));
  REQUIRE(first_b.lanes.size() == 1);
  CHECK(first_b.lanes[0].side == Side::Right);
  const auto last_a = parse_lane_output(read_file_text(dir / "out" / "lanes" / "a_00005.json"));
  CHECK(last_a.lanes.size() == 2);
}

TEST_CASE("frame size change inside a clip is a data error") {
  TempDir dir;
  auto a = straight_pair();
  a.frames = 1;
  auto b = a;
  b.width = 640;
  const auto ma = write_scenario(render_scenario(a), dir / "a", "same");
  const auto mb = write_scenario(render_scenario(b), dir / "b", "same");
  auto entries = read_manifest(ma);
  for (auto e : read_manifest(mb)) {
    e.frame_id = 1;
    entries.push_back(e);
  }
  write_manifest(entries, dir / "m.txt");
  CHECK_THROWS_AS(run_dataset(dir / "m.txt", PipelineConfig{}, dir / "out"), DataError);
}

TEST_CASE("bench reports spread across repeats") {
  const auto scn = render_scenario(straight_pair());
  const auto one = bench_frames(scn.frames, PipelineConfig{}, 1);
  CHECK(one.per_frame.samples == 6);
  CHECK(one.repeat_stddev_ms == 0.0);
  const auto ten = bench_frames(scn.frames, PipelineConfig{}, 10);
  CHECK(ten.per_frame.samples == 60);
  CHECK(ten.repeat_stddev_ms >= 0.0);
  CHECK(ten.mean_ms > 0.0);

  std::vector<ProbMapFrame> empty(3, ProbMapFrame{0, 800, 288, {}, {}});
  const auto e = bench_frames(empty, PipelineConfig{}, 2);
  CHECK(e.mean_ms < 1.0);
}

TEST_CASE("timing statistics") {
  const auto s = timing_stats({4, 1, 3, 2});
  CHECK(s.mean_ms == 2.5);
  CHECK(s.p50_ms == 2);
  CHECK(s.p99_ms == 4);
  CHECK(s.stddev_ms == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(timing_stats({}).samples == 0);
}

}
