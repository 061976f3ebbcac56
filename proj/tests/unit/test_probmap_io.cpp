#include "lanekit/probmap_io.hpp"

#include "tmpdir.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>

using namespace lanekit;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

std::string raw_header(std::uint32_t w, std::uint32_t h, std::uint32_t c) {
  std::string s = "RNLD";
  for (std::uint32_t v : {w, h, c})
    for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  return s;
}

std::string le_floats(const std::vector<float>& v) {
  std::string s;
  for (float f : v) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
  }
  return s;
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("probmap_io") {

TEST_CASE("Gray8 maps v to v/255") {
  TempDir dir;
  std::string pgm = "P5\n2 2\n255\n";
  for (unsigned char v : {0, 128, 255, 64}) pgm.push_back(static_cast<char>(v));
  write_bytes(dir / "a.pgm", pgm);
  const auto f = load_probmap(dir / "a.pgm", ProbMapFormat::Gray8Image);
  REQUIRE(f.channels.size() == 1);
  CHECK(f.width == 2);
  CHECK(f.height == 2);
  CHECK(f.channels[0](0, 0) == 0.0f);
  CHECK(f.channels[0](0, 1) == doctest::Approx(0.50196).epsilon(1e-5));
  CHECK(f.channels[0](1, 0) == 1.0f);
  CHECK(f.channels[0](1, 1) == doctest::Approx(0.25098).epsilon(1e-5));

  write_gray8(f.channels[0], dir / "b.pgm");
  const auto g = load_probmap(dir / "b.pgm", ProbMapFormat::Gray8Image);
  CHECK((g.channels[0] == f.channels[0]).all());
}

TEST_CASE("RawF32 round trip") {
  TempDir dir;
  ProbMapFrame f{0, 800, 288, {}, {}};
  for (int c = 0; c < 4; ++c) {
    ConfidenceGrid g = ConfidenceGrid::Zero(288, 800);
    for (int y = 0; y < 288; ++y) g(y, (y * (c + 1)) % 800) = static_cast<float>(c + 1) / 4.0f;
    f.channels.push_back(g);
  }
  write_raw_f32(f, dir / "f.rnld");
  CHECK(std::filesystem::file_size(dir / "f.rnld") == 16 + 800u * 288u * 4u * 4u);
  const auto back = load_probmap(dir / "f.rnld", ProbMapFormat::RawF32);
  CHECK(back.width == 800);
  CHECK(back.height == 288);
  REQUIRE(back.channels.size() == 4);
  for (int c = 0; c < 4; ++c) CHECK((back.channels[c] == f.channels[c]).all());
  CHECK(encode_raw_f32(back) == encode_raw_f32(f));
}

TEST_CASE("RawF32 byte layout is channel-planar little-endian") {
  TempDir dir;
  write_bytes(dir / "x.rnld", raw_header(2, 1, 2) + le_floats({0.1f, 0.2f, 0.3f, 0.4f}));
  const auto f = load_probmap(dir / "x.rnld", ProbMapFormat::RawF32);
  CHECK(f.channels[0](0, 1) == 0.2f);
  CHECK(f.channels[1](0, 0) == 0.3f);
}

TEST_CASE("RawF32 errors") {
  TempDir dir;
  write_bytes(dir / "short.rnld", raw_header(800, 288, 4) + le_floats(std::vector<float>(100, 0.5f)));
  CHECK(error_of([&] { load_probmap(dir / "short.rnld", ProbMapFormat::RawF32); }).find("truncated payload") !=
        std::string::npos);

  write_bytes(dir / "long.rnld", raw_header(1, 1, 1) + le_floats({0.5f, 0.5f}));
  CHECK_THROWS_AS(load_probmap(dir / "long.rnld", ProbMapFormat::RawF32), DataError);

  write_bytes(dir / "magic.rnld", "XXXX" + raw_header(1, 1, 1).substr(4) + le_floats({0.5f}));
  CHECK_THROWS_AS(load_probmap(dir / "magic.rnld", ProbMapFormat::RawF32), DataError);

  write_bytes(dir / "range.rnld", raw_header(1, 1, 1) + le_floats({1.5f}));
  CHECK(error_of([&] { load_probmap(dir / "range.rnld", ProbMapFormat::RawF32); }).find("out of range") !=
        std::string::npos);

  write_bytes(dir / "nan.rnld", raw_header(1, 1, 1) + le_floats({std::nanf("")}));
  CHECK_THROWS_AS(load_probmap(dir / "nan.rnld", ProbMapFormat::RawF32), DataError);

  CHECK_THROWS_AS(load_probmap(dir / "missing.rnld", ProbMapFormat::RawF32), DataError);
}

TEST_CASE("channels from separate images must agree in size") {
  TempDir dir;
  write_bytes(dir / "a.pgm", std::string("P5\n2 2\n255\n") + std::string(4, '\0'));
  write_bytes(dir / "b.pgm", std::string("P5\n3 2\n255\n") + std::string(6, '\0'));
  const std::vector<std::filesystem::path> ok{dir / "a.pgm", dir / "a.pgm"}, bad{dir / "a.pgm", dir / "b.pgm"};
  CHECK(load_probmap_channels(ok).channels.size() == 2);
  CHECK(error_of([&] { load_probmap_channels(bad); }).find("dimension mismatch") != std::string::npos);
}

TEST_CASE("LinesTxt") {
  const auto gt = parse_lines_txt("10 590 20 580 30 570\n");
  REQUIRE(gt.lanes.size() == 1);
  CHECK(gt.lanes[0] == Polyline{{10, 590}, {20, 580}, {30, 570}});
  CHECK_FALSE(gt.active_pair);

  const auto two = parse_lines_txt("500 280 520 200\n100 200 140 280\n");
  REQUIRE(two.active_pair);
  CHECK(two.lanes[1] == Polyline{{140, 280}, {100, 200}});  // stored bottom first
  CHECK(two.active_pair->left == 1);
  CHECK(two.active_pair->right == 0);

  const auto tagged = parse_lines_txt("# active 2 0\n1 9 1 1\n2 9 2 1\n3 9 3 1\n");
  CHECK(tagged.active_pair->left == 2);
  CHECK_THROWS_AS(parse_lines_txt("# active 5 0\n1 9 1 1\n"), DataError);
  CHECK_THROWS_AS(parse_lines_txt("1 2 3\n"), DataError);
  CHECK_THROWS_AS(parse_lines_txt("1 2\n"), DataError);
  CHECK_THROWS_AS(parse_lines_txt("1 2 a b\n"), DataError);
  CHECK(parse_lines_txt("").lanes.empty());
}

TEST_CASE("HSamplesJson") {
  const auto gt = parse_hsamples_json(R"({"lanes": [[-2, -2, 100, 110]], "h_samples": [240, 250, 260, 270]})");
  REQUIRE(gt.lanes.size() == 1);
  // Points (100,260) and (110,270), held bottom first.
  CHECK(gt.lanes[0] == Polyline{{110, 270}, {100, 260}});

  const auto empty = parse_hsamples_json(R"({"lanes": [], "h_samples": []})");
  CHECK(empty.lanes.empty());
  CHECK_FALSE(empty.active_pair);

  const auto active = parse_hsamples_json(
      R"({"frame_id": 9, "active": [1, 0], "lanes": [[1, 2], [5, 6], [9, 9]], "h_samples": [10, 20]})");
  CHECK(active.frame_id == 9);
  CHECK(active.active_pair->left == 1);
  CHECK_THROWS_AS(parse_hsamples_json(R"({"lanes": [[1]], "h_samples": [1, 2]})"), DataError);
  CHECK_THROWS_AS(parse_hsamples_json("not json"), DataError);
}

TEST_CASE("ground truth file round trip") {
  TempDir dir;
  GroundTruthFrame gt{3, {{{10, 280}, {20, 200}}, {{600, 280}, {580, 200}}, {{700, 280}, {750, 150}}}, ActivePair{0, 1}};
  write_lines_txt(gt, dir / "00003.lines.txt");
  const auto back = load_ground_truth(dir / "00003.lines.txt", GroundTruthFormat::LinesTxt);
  CHECK(back.lanes == gt.lanes);
  CHECK(back.active_pair->right == 1);
}

TEST_CASE("manifest round trip") {
  TempDir dir;
  std::vector<ManifestEntry> entries{
      {1, {dir / "maps/a.rnld"}, "c0", dir / "gt/a.lines.txt", std::nullopt, {1, 2}},
      {2, {dir / "m0.pgm", dir / "m1.pgm"}, "c1", std::nullopt, dir / "bg.ppm", {}},
  };
  write_manifest(entries, dir / "manifest.txt");
  const auto back = read_manifest(dir / "manifest.txt");
  REQUIRE(back.size() == 2);
  CHECK(back[0].maps == entries[0].maps);
  CHECK(back[0].clip == "c0");
  CHECK(back[0].ground_truth == entries[0].ground_truth);
  CHECK(back[0].active_channels == std::vector<int>{1, 2});
  CHECK(back[1].maps.size() == 2);
  CHECK(back[1].background == entries[1].background);

  write_bytes(dir / "bad.txt", "x maps/a.rnld\n");
  CHECK_THROWS_AS(read_manifest(dir / "bad.txt"), DataError);
  write_bytes(dir / "bad2.txt", "1 a.rnld active=1,x\n");
  CHECK_THROWS_AS(read_manifest(dir / "bad2.txt"), DataError);
}

}
