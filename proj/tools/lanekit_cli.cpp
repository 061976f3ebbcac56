#include "lanekit/config.hpp"
#include "lanekit/evaluation.hpp"
#include "lanekit/lane_output.hpp"
#include "lanekit/pipeline.hpp"
#include "lanekit/probmap_io.hpp"
#include "lanekit/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace lanekit;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2 };

struct PipelineFlags {
  fs::path manifest;
  fs::path config;
  fs::path out;
  std::string mode;
  bool no_pft = false;
  std::uint64_t seed = 0;  // accepted for interface parity; decoding draws no random numbers
  std::vector<std::string> overrides;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f, bool need_out) {
  cmd->add_option("--manifest", f.manifest, "Frame manifest")->required();
  cmd->add_option("--config", f.config, "JSON pipeline config");
  auto* out = cmd->add_option("--out", f.out, "Output directory");
  if (need_out) out->required();
  cmd->add_option("--mode", f.mode, "Decoder: enhanced or baseline")
      ->check(CLI::IsMember({"enhanced", "baseline"}));
  cmd->add_flag("--no-pft", f.no_pft, "Disable preceding-frame tracking");
  cmd->add_option("--seed", f.seed, "Run seed (decoding is deterministic; has no effect on output)");
  cmd->add_option("--set", f.overrides, "Config override section.key=value (repeatable)");
}

PipelineConfig make_config(const PipelineFlags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : PipelineConfig::load(f.config);
  cfg.apply_overrides(f.overrides);
  if (!f.mode.empty()) cfg.mode = parse_decode_mode(f.mode);
  if (f.no_pft) cfg.tracker.pft_enabled = false;
  cfg.validate();
  return cfg;
}

void print_summary(const RunSummary& s) {
  std::printf("frames %zu  clips %zu  mean %.3f ms  p50 %.3f ms  p99 %.3f ms\n", s.frames, s.clips, s.timing.mean_ms,
              s.timing.p50_ms, s.timing.p99_ms);
  if (s.eval) {
    std::printf("accuracy  @0.3 %.4f  @0.4 %.4f  @0.5 %.4f  (%zu ground-truth lanes)\n", s.eval->accuracy_at(0.3),
                s.eval->accuracy_at(0.4), s.eval->accuracy_at(0.5), s.eval->ground_truth_lanes);
  }
}

int cmd_run(const PipelineFlags& f, bool overlay, std::optional<DecodeMode> forced) {
  PipelineConfig cfg = make_config(f);
  if (forced) cfg.mode = *forced;
  print_summary(run_dataset(f.manifest, cfg, f.out, RunOptions{overlay}));
  return kOk;
}

// Scores lane files from an earlier run against the manifest's ground truth.
int cmd_eval(const PipelineFlags& f, fs::path lanes_dir) {
  const PipelineConfig cfg = make_config(f);
  if (lanes_dir.empty()) lanes_dir = f.out / "lanes";
  std::vector<PredictionFrame> preds;
  std::vector<GroundTruthFrame> gts;
  for (const auto& e : read_manifest(f.manifest)) {
    if (!e.ground_truth) continue;
    const ProbMapFrame frame = load_entry(e);
    const LaneFile lanes = parse_lane_output(read_file_text(lanes_dir / (clip_frame_name(e.clip, e.frame_id) + ".json")));
    PredictionFrame p{e.frame_id, frame.width, frame.height, std::nullopt, std::nullopt};
    for (const auto& r : lanes.lanes) {
      if (r.side == Side::Left) p.left = r.points;
      if (r.side == Side::Right) p.right = r.points;
    }
    preds.push_back(std::move(p));
    gts.push_back(load_entry_ground_truth(e));
  }
  if (gts.empty()) throw DataError("manifest has no ground truth to score against");
  const EvalReport rep = evaluate(preds, gts, cfg.eval);
  fs::create_directories(f.out);
  std::ofstream(f.out / "eval.json") << rep.to_json();
  std::ofstream(f.out / "eval.csv") << rep.to_csv();
  std::printf("accuracy  @0.3 %.4f  @0.4 %.4f  @0.5 %.4f  (%zu ground-truth lanes, %zu frames skipped)\n",
              rep.accuracy_at(0.3), rep.accuracy_at(0.4), rep.accuracy_at(0.5), rep.ground_truth_lanes,
              rep.skipped_frames);
  return kOk;
}

struct SynthFlags {
  fs::path out;
  std::uint64_t seed = 0;
  int frames = 20;
  double salt = 0.0;
  double salt_amplitude = 0.4;
  std::vector<std::string> dropout;
  std::string clip = "clip0";
};

int cmd_synth(const SynthFlags& f) {
  ScenarioSpec spec = default_scenario(f.seed);
  spec.frames = f.frames;
  spec.salt_density = f.salt;
  spec.salt_amplitude = f.salt_amplitude;
  for (const auto& d : f.dropout) {
    const auto colon = d.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--dropout expects frame:lane, got '" + d + "'");
    spec.dropout.insert({std::stoi(d.substr(0, colon)), std::stoi(d.substr(colon + 1))});
  }
  const fs::path manifest = write_scenario(render_scenario(spec), f.out, f.clip);
  std::printf("%s\n", manifest.string().c_str());
  return kOk;
}

int cmd_bench(const PipelineFlags& f, std::size_t repeats, std::size_t warmup) {
  const PipelineConfig cfg = make_config(f);
  const BenchReport b = bench(f.manifest, cfg, repeats, warmup);
  nlohmann::ordered_json j;
  j["mode"] = to_string(cfg.mode);
  j["pft_enabled"] = cfg.tracker.pft_enabled;
  j["frames"] = b.frames;
  j["repeats"] = b.repeats;
  j["mean_ms"] = b.mean_ms;
  j["repeat_stddev_ms"] = b.repeat_stddev_ms;
  j["p50_ms"] = b.per_frame.p50_ms;
  j["p99_ms"] = b.per_frame.p99_ms;
  j["stddev_ms"] = b.per_frame.stddev_ms;
  const std::string text = j.dump(2) + "\n";
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    std::ofstream(f.out / "bench.json") << text;
  }
  std::cout << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active lane extraction and tracking from lane probability maps"};
  app.require_subcommand(1);

  PipelineFlags run_f, base_f, eval_f, bench_f;
  bool overlay = false, base_overlay = false;

  auto* run = app.add_subcommand("run", "Run the pipeline over a manifest");
  add_pipeline_flags(run, run_f, true);
  run->add_flag("--overlay", overlay, "Write overlay images");

  auto* baseline = app.add_subcommand("baseline", "Run the row-argmax comparison decoder over a manifest");
  add_pipeline_flags(baseline, base_f, true);
  baseline->add_flag("--overlay", base_overlay, "Write overlay images");

  fs::path lanes_dir;
  auto* eval = app.add_subcommand("eval", "Score lane files against ground truth");
  add_pipeline_flags(eval, eval_f, true);
  eval->add_option("--lanes", lanes_dir, "Directory of lane files (default <out>/lanes)");

  SynthFlags synth_f;
  auto* synth = app.add_subcommand("synth", "Write a synthetic clip with ground truth");
  synth->add_option("--out", synth_f.out, "Output directory")->required();
  synth->add_option("--seed", synth_f.seed, "Noise seed");
  synth->add_option("--frames", synth_f.frames, "Frame count")->check(CLI::PositiveNumber);
  synth->add_option("--salt", synth_f.salt, "Salt noise density")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--salt-amplitude", synth_f.salt_amplitude, "Salt noise value")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--dropout", synth_f.dropout, "Zero a channel on one frame, frame:lane (repeatable)");
  synth->add_option("--clip", synth_f.clip, "Clip name");

  std::size_t repeats = 10, warmup = 1;
  auto* benchc = app.add_subcommand("bench", "Time the pipeline on preloaded frames");
  add_pipeline_flags(benchc, bench_f, false);
  benchc->add_option("--repeats", repeats, "Timed passes")->check(CLI::PositiveNumber);
  benchc->add_option("--warmup", warmup, "Untimed passes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_f, overlay, std::nullopt);
    if (baseline->parsed()) return cmd_run(base_f, base_overlay, DecodeMode::Baseline);
    if (eval->parsed()) return cmd_eval(eval_f, lanes_dir);
    if (synth->parsed()) return cmd_synth(synth_f);
    if (benchc->parsed()) return cmd_bench(bench_f, repeats, warmup);
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
