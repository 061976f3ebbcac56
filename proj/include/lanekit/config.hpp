#pragma once

#include "lanekit/evaluation.hpp"
#include "lanekit/extraction.hpp"
#include "lanekit/lane_model.hpp"
#include "lanekit/regression.hpp"
#include "lanekit/tracker.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace lanekit {

enum class DecodeMode {
  Enhanced,  // extraction, classification, construction and tracking
  Baseline,  // argmax every twenty rows joined by cubic splines, no tracking
};

const char* to_string(DecodeMode m);
DecodeMode parse_decode_mode(const std::string& s);

struct PipelineConfig {
  DecodeMode mode = DecodeMode::Enhanced;
  ExtractionConfig extraction;
  ClassifierConfig classifier;
  RegressionConfig regression;
  TrackerConfig tracker;
  EvalConfig eval;
  BaselineConfig baseline;

  void validate() const;

  /// JSON with one object per stage; unknown keys are rejected.
  [[nodiscard]] std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig load(const std::filesystem::path& path);

  /// Applies "section.key=value" overrides, value parsed as JSON when possible.
  void apply_overrides(std::span<const std::string> overrides);
};

}  // namespace lanekit
