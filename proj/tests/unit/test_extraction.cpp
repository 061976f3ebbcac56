#include "lanekit/extraction.hpp"

#include "../oracles.hpp"

#include <doctest.h>

using namespace lanekit;

namespace {
ConfidenceGrid grid(int w, int h) { return ConfidenceGrid::Zero(h, w); }
}  // namespace

TEST_SUITE("extraction") {

TEST_CASE("adaptive_threshold") {
  ExtractionConfig cfg;
  auto g = grid(4, 4);
  g(1, 2) = 0.9f;
  CHECK(adaptive_threshold(g, cfg) == doctest::Approx(0.45));
  g(1, 2) = 0.05f;
  CHECK(adaptive_threshold(g, cfg) == doctest::Approx(0.1));
  g(1, 2) = 1.0f;
  cfg.alpha = 1.0;
  CHECK(adaptive_threshold(g, cfg) == 1.0);
}

TEST_CASE("single column lane") {
  auto g = grid(800, 288);
  for (int y = 280; y >= 0; y -= 10) g(y, 40) = 0.9f;
  const auto pts = extract_lane_points(g, {});
  const auto ref = oracle::windowed_scan(g, 0.5, 0.1);
  REQUIRE(!pts.empty());
  CHECK(pts == ref);
  CHECK(pts.front().y == 280);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].x == 40);
    CHECK(pts[i].confidence == doctest::Approx(0.9));
    CHECK(static_cast<int>(pts[i].y) % 10 == 0);
    if (i) CHECK(pts[i].y < pts[i - 1].y);
  }
}

TEST_CASE("all-zero channel") { CHECK(extract_lane_points(grid(800, 288), {}).empty()); }

TEST_CASE("blob outside the window is ignored") {
  auto g = grid(800, 288);
  for (int y = 0; y < 288; ++y) {
    g(y, 100) = 0.9f;
    g(y, 600) = 0.8f;
  }
  const auto pts = extract_lane_points(g, {});
  CHECK(pts == oracle::windowed_scan(g, 0.5, 0.1));
  REQUIRE(pts.size() > 5);
  for (const auto& p : pts) CHECK(p.x == 100);
}

TEST_CASE("gap bridging and re-seed") {
  auto g = grid(800, 288);
  // rows 287..200 then a gap of 60 rows (> 3 windows of 14), then 139..0.
  for (int y = 287; y >= 200; y -= 3) g(y, 300) = 0.9f;
  for (int y = 139; y >= 0; y -= 3) g(y, 320) = 0.9f;
  const auto pts = extract_lane_points(g, {});
  CHECK(pts == oracle::windowed_scan(g, 0.5, 0.1));
  CHECK(pts.back().y < 14);

  // A short gap is bridged without needing the re-seed.
  auto h = grid(800, 288);
  for (int y = 287; y >= 0; y -= 3)
    if (y > 180 || y < 150) h(y, 300) = 0.9f;
  CHECK(extract_lane_points(h, {}) == oracle::windowed_scan(h, 0.5, 0.1));
}

TEST_CASE("extraction agrees with the brute-force scan on random grids") {
  for (int trial = 0; trial < 40; ++trial) {
    const int w = oracle::uniform_int(60, 400), hgt = oracle::uniform_int(40, 300);
    auto g = grid(w, hgt);
    const int blobs = oracle::uniform_int(1, 4);
    for (int b = 0; b < blobs; ++b) {
      double x = oracle::uniform(0, w - 1);
      const double dx = oracle::uniform(-1.5, 1.5);
      for (int y = hgt - 1; y >= 0; --y, x += dx) {
        const int xi = static_cast<int>(std::lround(x));
        if (xi < 0 || xi >= w) break;
        if (oracle::uniform(0, 1) < 0.3) continue;
        g(y, xi) = static_cast<float>(oracle::uniform_int(1, 10)) / 10.0f;
      }
    }
    for (int k = 0; k < w * hgt / 200; ++k)
      g(oracle::uniform_int(0, hgt - 1), oracle::uniform_int(0, w - 1)) = static_cast<float>(oracle::uniform(0, 1));
    const auto pts = extract_lane_points(g, {});
    CHECK(pts == oracle::windowed_scan(g, 0.5, 0.1));
    const double thr = adaptive_threshold(g, {});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(pts[i].confidence > thr);
      if (i) CHECK(pts[i].y < pts[i - 1].y);
    }
  }
}

TEST_CASE("config validation") {
  ExtractionConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg = {};
  cfg.row_step_divisor = 0;
  CHECK_THROWS(cfg.validate());
}

}
