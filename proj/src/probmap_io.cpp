#include "lanekit/probmap_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lanekit {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'R', 'N', 'L', 'D'};
constexpr std::size_t kHeaderBytes = 16;

std::uint32_t read_u32_le(const std::byte* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

float read_f32_le(const std::byte* p) { return std::bit_cast<float>(read_u32_le(p)); }

void put_f32_le(std::vector<std::byte>& out, float v) { put_u32_le(out, std::bit_cast<std::uint32_t>(v)); }

// Ordered so that x is sampled bottom-to-top; errors on non-monotonic rows.
Polyline normalise_lane(Polyline lane, std::size_t index) {
  const std::string where = "ground truth lane " + std::to_string(index);
  if (lane.size() < 2) throw DataError(where + ": fewer than 2 valid points");
  if (lane.front().y < lane.back().y) std::reverse(lane.begin(), lane.end());
  for (std::size_t i = 1; i < lane.size(); ++i) {
    if (!(lane[i].y < lane[i - 1].y)) throw DataError(where + ": y is not strictly monotonic");
  }
  return lane;
}

void infer_active_pair(GroundTruthFrame& gt) {
  if (gt.active_pair || gt.lanes.size() != 2) return;
  const bool first_left = gt.lanes[0].front().x <= gt.lanes[1].front().x;
  gt.active_pair = first_left ? ActivePair{0, 1} : ActivePair{1, 0};
}

void check_active_pair(const GroundTruthFrame& gt) {
  if (!gt.active_pair) return;
  if (gt.active_pair->left >= gt.lanes.size() || gt.active_pair->right >= gt.lanes.size()) {
    throw DataError("ground truth active pair refers to a missing lane");
  }
}

std::optional<std::int64_t> numeric_stem(const fs::path& path) {
  const std::string stem = path.stem().string();
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  if (ec != std::errc{} || ptr != stem.data() + stem.size()) return std::nullopt;
  return v;
}

}  // namespace

std::vector<std::byte> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw DataError("short read on " + path.string());
  return bytes;
}

std::string read_file_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void validate_frame(const ProbMapFrame& frame) {
  if (frame.channels.empty()) throw DataError("probability map has no channels");
  for (const auto& ch : frame.channels) {
    if (ch.rows() != frame.height || ch.cols() != frame.width) {
      throw DataError("dimension mismatch between channels");
    }
    if (ch.size() > 0 && (!(ch.minCoeff() >= 0.0f) || !(ch.maxCoeff() <= 1.0f) || !ch.allFinite())) {
      throw DataError("confidence value out of range [0, 1]");
    }
  }
}

ProbMapFrame decode_raw_f32(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderBytes) throw DataError("malformed header: file shorter than 16 bytes");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("malformed header: bad magic");
  const std::uint32_t w = read_u32_le(bytes.data() + 4);
  const std::uint32_t h = read_u32_le(bytes.data() + 8);
  const std::uint32_t c = read_u32_le(bytes.data() + 12);
  if (w == 0 || h == 0 || c == 0) throw DataError("malformed header: zero dimension");
  const std::uint64_t cells = std::uint64_t{w} * h;
  const std::uint64_t expected = cells * c * 4;
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (payload < expected) throw DataError("truncated payload");
  if (payload > expected) throw DataError("payload longer than declared dimensions");

  ProbMapFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.channels.reserve(c);
  const std::byte* p = bytes.data() + kHeaderBytes;
  for (std::uint32_t k = 0; k < c; ++k) {
    ConfidenceGrid grid(h, w);
    float* dst = grid.data();
    for (std::uint64_t i = 0; i < cells; ++i, p += 4) dst[i] = read_f32_le(p);
    frame.channels.push_back(std::move(grid));
  }
  validate_frame(frame);
  return frame;
}

std::vector<std::byte> encode_raw_f32(const ProbMapFrame& frame) {
  validate_frame(frame);
  std::vector<std::byte> out;
  const std::size_t cells = static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height);
  out.reserve(kHeaderBytes + cells * frame.channels.size() * 4);
  for (char ch : kMagic) out.push_back(static_cast<std::byte>(ch));
  put_u32_le(out, static_cast<std::uint32_t>(frame.width));
  put_u32_le(out, static_cast<std::uint32_t>(frame.height));
  put_u32_le(out, static_cast<std::uint32_t>(frame.channels.size()));
  for (const auto& ch : frame.channels) {
    const float* src = ch.data();
    for (std::size_t i = 0; i < cells; ++i) put_f32_le(out, src[i]);
  }
  return out;
}

void write_raw_f32(const ProbMapFrame& frame, const fs::path& path) {
  const auto bytes = encode_raw_f32(frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ConfidenceGrid decode_gray8(std::span<const std::byte> bytes) {
  // P5 header: magic, width, height, maxval, each separated by whitespace; '#' comments allowed.
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = static_cast<char>(bytes[pos]);
      if (c == '#') {
        while (pos < bytes.size() && static_cast<char>(bytes[pos]) != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto token = [&] {
    skip_space();
    std::string t;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      t.push_back(static_cast<char>(bytes[pos++]));
    }
    return t;
  };
  auto number = [&](const char* what) {
    const std::string t = token();
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || v <= 0) {
      throw DataError(std::string("malformed header: bad PGM ") + what);
    }
    return v;
  };

  if (token() != "P5") throw DataError("malformed header: not a binary PGM (P5)");
  const int w = number("width");
  const int h = number("height");
  const int maxval = number("maxval");
  if (maxval != 255) throw DataError("malformed header: Gray8 requires maxval 255");
  ++pos;  // single whitespace byte before the raster
  const std::size_t cells = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < pos + cells) throw DataError("truncated payload");

  ConfidenceGrid grid(h, w);
  float* dst = grid.data();
  for (std::size_t i = 0; i < cells; ++i) dst[i] = static_cast<float>(static_cast<unsigned>(bytes[pos + i])) / 255.0f;
  return grid;
}

void write_gray8(const ConfidenceGrid& channel, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P5\n" << channel.cols() << ' ' << channel.rows() << "\n255\n";
  const float* src = channel.data();
  for (Eigen::Index i = 0; i < channel.size(); ++i) {
    const float v = std::clamp(src[i], 0.0f, 1.0f);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
  }
}

ProbMapFrame load_probmap(const fs::path& path, ProbMapFormat format) {
  const auto bytes = read_file_bytes(path);
  ProbMapFrame frame;
  if (format == ProbMapFormat::RawF32) {
    frame = decode_raw_f32(bytes);
  } else {
    ConfidenceGrid g = decode_gray8(bytes);
    frame.width = static_cast<int>(g.cols());
    frame.height = static_cast<int>(g.rows());
    frame.channels.push_back(std::move(g));
  }
  if (auto id = numeric_stem(path)) frame.frame_id = *id;
  return frame;
}

ProbMapFrame load_probmap_channels(std::span<const fs::path> paths) {
  if (paths.empty()) throw DataError("no channel files given");
  ProbMapFrame frame;
  for (const auto& p : paths) {
    auto ch = decode_gray8(read_file_bytes(p));
    if (frame.channels.empty()) {
      frame.width = static_cast<int>(ch.cols());
      frame.height = static_cast<int>(ch.rows());
    }
    frame.channels.push_back(std::move(ch));
  }
  validate_frame(frame);
  return frame;
}

GroundTruthFrame parse_lines_txt(const std::string& text) {
  GroundTruthFrame gt;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string key;
      if (first == "#") ls >> key; else key = first.substr(1);
      if (key == "active") {
        std::size_t l = 0, r = 0;
        if (!(ls >> l >> r)) throw DataError("malformed '# active' line");
        gt.active_pair = ActivePair{l, r};
      }
      continue;
    }
    std::istringstream vs(line);
    std::vector<double> values;
    double v = 0.0;
    while (vs >> v) values.push_back(v);
    if (!vs.eof()) throw DataError("non-numeric token in lines file");
    if (values.size() % 2 != 0) throw DataError("odd number of coordinates in lines file");
    Polyline lane;
    for (std::size_t i = 0; i < values.size(); i += 2) lane.push_back({values[i], values[i + 1]});
    gt.lanes.push_back(normalise_lane(std::move(lane), gt.lanes.size()));
  }
  infer_active_pair(gt);
  check_active_pair(gt);
  return gt;
}

GroundTruthFrame parse_hsamples_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ground truth json: ") + e.what());
  }
  GroundTruthFrame gt;
  try {
    const auto ys = j.at("h_samples").get<std::vector<double>>();
    const auto lanes = j.at("lanes").get<std::vector<std::vector<double>>>();
    for (const auto& xs : lanes) {
      if (xs.size() != ys.size()) throw DataError("lane length differs from h_samples length");
      Polyline lane;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == -2.0) continue;
        lane.push_back({xs[i], ys[i]});
      }
      gt.lanes.push_back(normalise_lane(std::move(lane), gt.lanes.size()));
    }
    if (j.contains("frame_id")) gt.frame_id = j.at("frame_id").get<std::int64_t>();
    if (j.contains("active")) {
      const auto a = j.at("active").get<std::vector<std::size_t>>();
      if (a.size() != 2) throw DataError("\"active\" must hold two lane indices");
      gt.active_pair = ActivePair{a[0], a[1]};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ground truth json: ") + e.what());
  }
  infer_active_pair(gt);
  check_active_pair(gt);
  return gt;
}

GroundTruthFrame load_ground_truth(const fs::path& path, GroundTruthFormat format) {
  const std::string text = read_file_text(path);
  GroundTruthFrame gt = format == GroundTruthFormat::LinesTxt ? parse_lines_txt(text) : parse_hsamples_json(text);
  if (auto id = numeric_stem(path); id && format == GroundTruthFormat::LinesTxt) gt.frame_id = *id;
  return gt;
}

void write_lines_txt(const GroundTruthFrame& gt, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  if (gt.active_pair) out << "# active " << gt.active_pair->left << ' ' << gt.active_pair->right << '\n';
  out.precision(10);
  for (const auto& lane : gt.lanes) {
    for (std::size_t i = 0; i < lane.size(); ++i) {
      out << (i ? " " : "") << lane[i].x << ' ' << lane[i].y;
    }
    out << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const std::string text = read_file_text(path);
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    ManifestEntry e;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), e.frame_id);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw DataError("manifest line " + std::to_string(lineno) + ": bad frame id '" + tok + "'");
    }
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        e.maps.push_back(resolve(tok));
        continue;
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "clip") {
        e.clip = val;
      } else if (key == "gt") {
        e.ground_truth = resolve(val);
      } else if (key == "bg") {
        e.background = resolve(val);
      } else if (key == "active") {
        std::istringstream as(val);
        std::string part;
        while (std::getline(as, part, ',')) {
          int c = 0;
          const auto [p2, ec2] = std::from_chars(part.data(), part.data() + part.size(), c);
          if (ec2 != std::errc{} || p2 != part.data() + part.size() || c < 0) {
            throw DataError("manifest line " + std::to_string(lineno) + ": bad active channel list");
          }
          e.active_channels.push_back(c);
        }
      } else {
        throw DataError("manifest line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
    }
    if (e.maps.empty()) throw DataError("manifest line " + std::to_string(lineno) + ": no probability map path");
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(std::span<const ManifestEntry> entries, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "# frame_id maps... [clip=] [gt=] [active=] [bg=]\n";
  for (const auto& e : entries) {
    out << e.frame_id;
    for (const auto& m : e.maps) out << ' ' << m.generic_string();
    if (!e.clip.empty()) out << " clip=" << e.clip;
    if (e.ground_truth) out << " gt=" << e.ground_truth->generic_string();
    if (!e.active_channels.empty()) {
      out << " active=";
      for (std::size_t i = 0; i < e.active_channels.size(); ++i) out << (i ? "," : "") << e.active_channels[i];
    }
    if (e.background) out << " bg=" << e.background->generic_string();
    out << '\n';
  }
}

ProbMapFrame load_entry(const ManifestEntry& entry) {
  ProbMapFrame frame;
  const bool single_raw = entry.maps.size() == 1 && entry.maps.front().extension() != ".pgm";
  if (single_raw) {
    frame = load_probmap(entry.maps.front(), ProbMapFormat::RawF32);
  } else {
    frame = load_probmap_channels(entry.maps);
  }
  frame.frame_id = entry.frame_id;
  frame.active_hints.assign(frame.channels.size(), false);
  for (int c : entry.active_channels) {
    if (static_cast<std::size_t>(c) >= frame.channels.size()) {
      throw DataError("active channel " + std::to_string(c) + " out of range");
    }
    frame.active_hints[static_cast<std::size_t>(c)] = true;
  }
  return frame;
}

GroundTruthFrame load_entry_ground_truth(const ManifestEntry& entry) {
  if (!entry.ground_truth) throw DataError("frame " + std::to_string(entry.frame_id) + " has no ground truth");
  const auto fmt = entry.ground_truth->extension() == ".json" ? GroundTruthFormat::HSamplesJson
                                                               : GroundTruthFormat::LinesTxt;
  GroundTruthFrame gt = load_ground_truth(*entry.ground_truth, fmt);
  gt.frame_id = entry.frame_id;
  return gt;
}

}  // namespace lanekit
