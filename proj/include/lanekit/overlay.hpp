#pragma once

#include "lanekit/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lanekit {

/// 8-bit RGB image, row-major.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * 3

  static RgbImage blank(int w, int h);
  /// Binary PGM (P5) or PPM (P6), maxval 255.
  static RgbImage load(const std::filesystem::path& path);
  void save_ppm(const std::filesystem::path& path) const;
  void draw(std::span<const Point2> polyline, std::array<std::uint8_t, 3> color, double width);
};

}  // namespace lanekit
