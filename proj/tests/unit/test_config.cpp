#include "lanekit/config.hpp"

#include "tmpdir.hpp"

#include <doctest.h>

#include <fstream>

using namespace lanekit;

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const PipelineConfig c;
  CHECK(c.mode == DecodeMode::Enhanced);
  CHECK(c.extraction.alpha == 0.5);
  CHECK(c.extraction.tau_min == 0.1);
  CHECK(c.classifier.n == 3);
  CHECK(c.classifier.k == 2);
  CHECK(c.classifier.window == 3);
  CHECK(c.regression.kappa == 2.5);
  CHECK(c.tracker.psi_active == 1.0);
  CHECK(c.tracker.psi_inactive == 0.5);
  CHECK(c.tracker.max_miss == 10);
  CHECK(c.tracker.match_tol_divisor == 200);
  CHECK(c.eval.gt_line_width == 16);
  CHECK(c.eval.pred_line_width == 30);
  REQUIRE(c.eval.thresholds.size() == 21);
  CHECK(c.eval.thresholds.front() == doctest::Approx(0.30));
  CHECK(c.eval.thresholds.back() == doctest::Approx(0.50));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("json round trip") {
  PipelineConfig c;
  c.mode = DecodeMode::Baseline;
  c.extraction.alpha = 0.4;
  c.tracker.pft_enabled = false;
  const auto back = PipelineConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.mode == DecodeMode::Baseline);
  CHECK_FALSE(back.tracker.pft_enabled);
}

TEST_CASE("partial files keep defaults; unknown keys fail") {
  const auto c = PipelineConfig::from_json(R"({"tracker": {"max_miss": 4}})");
  CHECK(c.tracker.max_miss == 4);
  CHECK(c.extraction.alpha == 0.5);
  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"tracker": {"maxmiss": 4}})"), std::invalid_argument);
  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"trackers": {}})"), std::invalid_argument);
  CHECK_THROWS_AS(PipelineConfig::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"extraction": {"alpha": 2}})"), std::invalid_argument);
}

TEST_CASE("overrides") {
  PipelineConfig c;
  const std::vector<std::string> ov{"extraction.alpha=0.6", "tracker.pft_enabled=false", "mode=baseline"};
  c.apply_overrides(ov);
  CHECK(c.extraction.alpha == 0.6);
  CHECK_FALSE(c.tracker.pft_enabled);
  CHECK(c.mode == DecodeMode::Baseline);
  const std::vector<std::string> bad{"tracker.nope=1"}, no_eq{"tracker.max_miss"};
  CHECK_THROWS_AS(c.apply_overrides(bad), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_overrides(no_eq), std::invalid_argument);
}

TEST_CASE("load from file") {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"classifier": {"n": 4}})";
  CHECK(PipelineConfig::load(dir / "c.json").classifier.n == 4);
  CHECK_THROWS(PipelineConfig::load(dir / "missing.json"));
}

TEST_CASE("decode mode names") {
  CHECK(parse_decode_mode("enhanced") == DecodeMode::Enhanced);
  CHECK(parse_decode_mode("baseline") == DecodeMode::Baseline);
  CHECK(std::string(to_string(DecodeMode::Baseline)) == "baseline");
  CHECK_THROWS_AS(parse_decode_mode("fast"), std::invalid_argument);
}

TEST_CASE("history must cover the corroboration window") {
  PipelineConfig c;
  c.classifier.window = 9;
  CHECK_THROWS(c.validate());
}

}
