#pragma once

// On-disk formats.
//
// RawF32 probability map:
//   bytes 0..3   magic "RNLD"
//   bytes 4..15  u32 width, u32 height, u32 channels (little-endian)
//   payload      width*height*channels float32 (little-endian), channel-planar,
//                each channel row-major
//
// Gray8 probability map: binary PGM (P5, maxval 255), one channel, value v -> v/255.
//
// Frame manifest: one frame per line, '#' starts a comment,
//   <frame_id> <map path> [<map path> ...] [clip=<name>] [gt=<path>] [active=<i>,<j>] [bg=<path>]
// Relative paths resolve against the manifest's directory. A single .rnld path
// carries every channel; several .pgm paths form the channels in order.
//
// LinesTxt ground truth: one lane per line as whitespace-separated "x y" pairs.
// An optional "# active <i> <j>" line names the left/right active markings;
// without it a file holding exactly two lanes treats them as the active pair.
//
// HSamplesJson ground truth: {"lanes": [[x...], ...], "h_samples": [y...],
// "active": [i, j]?}; x = -2 marks a missing sample.

#include "lanekit/types.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lanekit {

enum class ProbMapFormat { RawF32, Gray8Image };
enum class GroundTruthFormat { LinesTxt, HSamplesJson };

/// Loads one frame. Gray8Image yields a single channel. Throws DataError on any
/// malformed input (bad magic, truncated payload, values outside [0, 1]).
ProbMapFrame load_probmap(const std::filesystem::path& path, ProbMapFormat format);

/// Assembles a frame from single-channel files, in order.
ProbMapFrame load_probmap_channels(std::span<const std::filesystem::path> paths);

ProbMapFrame decode_raw_f32(std::span<const std::byte> bytes);
std::vector<std::byte> encode_raw_f32(const ProbMapFrame& frame);
void write_raw_f32(const ProbMapFrame& frame, const std::filesystem::path& path);

ConfidenceGrid decode_gray8(std::span<const std::byte> bytes);
void write_gray8(const ConfidenceGrid& channel, const std::filesystem::path& path);

/// Checks channel count, shared shape and value range.
void validate_frame(const ProbMapFrame& frame);

GroundTruthFrame load_ground_truth(const std::filesystem::path& path, GroundTruthFormat format);
GroundTruthFrame parse_lines_txt(const std::string& text);
GroundTruthFrame parse_hsamples_json(const std::string& text);
void write_lines_txt(const GroundTruthFrame& gt, const std::filesystem::path& path);

struct ManifestEntry {
  std::int64_t frame_id = 0;
  std::vector<std::filesystem::path> maps;
  std::string clip;
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> background;
  std::vector<int> active_channels;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
/// Paths are written as given; pass paths relative to the manifest directory.
void write_manifest(std::span<const ManifestEntry> entries, const std::filesystem::path& path);

/// Loads the frame an entry points at and applies its active-channel hints.
ProbMapFrame load_entry(const ManifestEntry& entry);
/// .json files parse as HSamplesJson, anything else as LinesTxt. The entry's frame_id wins.
GroundTruthFrame load_entry_ground_truth(const ManifestEntry& entry);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

}  // namespace lanekit
