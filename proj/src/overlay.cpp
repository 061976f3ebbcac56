#include "lanekit/overlay.hpp"

#include "lanekit/evaluation.hpp"
#include "lanekit/probmap_io.hpp"

#include <cctype>
#include <fstream>

namespace lanekit {

RgbImage RgbImage::blank(int w, int h) {
  return RgbImage{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0)};
}

RgbImage RgbImage::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  std::size_t pos = 0;
  auto token = [&] {
    while (pos < bytes.size()) {
      const auto c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && static_cast<char>(bytes[pos]) != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      t.push_back(static_cast<char>(bytes[pos++]));
    }
    return t;
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P6") throw DataError(path.string() + ": background must be binary PGM or PPM");
  RgbImage img;
  try {
    img.width = std::stoi(token());
    img.height = std::stoi(token());
    if (std::stoi(token()) != 255) throw DataError(path.string() + ": maxval must be 255");
  } catch (const std::logic_error&) {
    throw DataError(path.string() + ": malformed image header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const std::size_t channels = magic == "P6" ? 3 : 1;
  if (bytes.size() < pos + n * channels) throw DataError(path.string() + ": truncated image");
  img.pixels.resize(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      img.pixels[i * 3 + k] = static_cast<std::uint8_t>(bytes[pos + i * channels + (channels == 3 ? k : 0)]);
    }
  }
  return img;
}

void RgbImage::save_ppm(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void RgbImage::draw(std::span<const Point2> polyline, std::array<std::uint8_t, 3> color, double width) {
  if (polyline.size() < 2) return;
  const Mask m = rasterize_polyline(polyline, width, this->width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < this->width; ++x) {
      if (!m(y, x)) continue;
      const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(this->width) + x) * 3;
      pixels[i] = color[0];
      pixels[i + 1] = color[1];
      pixels[i + 2] = color[2];
    }
  }
}

}  // namespace lanekit
