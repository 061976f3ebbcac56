#include "lanekit/config.hpp"

#include "lanekit/probmap_io.hpp"

#include <json.hpp>

namespace lanekit {

using json = nlohmann::ordered_json;

const char* to_string(DecodeMode m) { return m == DecodeMode::Enhanced ? "enhanced" : "baseline"; }

DecodeMode parse_decode_mode(const std::string& s) {
  if (s == "enhanced") return DecodeMode::Enhanced;
  if (s == "baseline") return DecodeMode::Baseline;
  throw std::invalid_argument("unknown mode '" + s + "' (expected enhanced or baseline)");
}

void PipelineConfig::validate() const {
  extraction.validate();
  tracker.validate();
  eval.validate();
  if (classifier.n < 1 || classifier.k < 1 || classifier.window < classifier.k) {
    throw std::invalid_argument("classifier: require n >= 1 and 1 <= k <= window");
  }
  if (tracker.curve_history_length < classifier.window) {
    throw std::invalid_argument("tracker.curve_history_length must cover classifier.window");
  }
  if (!(regression.kappa > 0.0)) throw std::invalid_argument("regression: kappa must be positive");
  if (baseline.row_step < 1) throw std::invalid_argument("baseline: row_step must be >= 1");
}

namespace {

json to_tree(const PipelineConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["extraction"] = {{"alpha", c.extraction.alpha},
                     {"tau_min", c.extraction.tau_min},
                     {"row_step_divisor", c.extraction.row_step_divisor},
                     {"col_span_divisor", c.extraction.col_span_divisor},
                     {"max_gap_windows", c.extraction.max_gap_windows},
                     {"max_reseeds", c.extraction.max_reseeds}};
  j["classifier"] = {{"n", c.classifier.n}, {"k", c.classifier.k}, {"window", c.classifier.window}};
  j["regression"] = {{"kappa", c.regression.kappa}, {"min_abs_gradient", c.regression.min_abs_gradient}};
  j["tracker"] = {{"psi_active", c.tracker.psi_active},
                  {"psi_inactive", c.tracker.psi_inactive},
                  {"match_tol_divisor", c.tracker.match_tol_divisor},
                  {"max_miss", c.tracker.max_miss},
                  {"pft_enabled", c.tracker.pft_enabled},
                  {"curve_history_length", c.tracker.curve_history_length}};
  j["eval"] = {{"eval_width", c.eval.eval_width},
               {"gt_line_width", c.eval.gt_line_width},
               {"pred_line_width", c.eval.pred_line_width},
               {"thresholds", c.eval.thresholds}};
  j["baseline"] = {{"row_step", c.baseline.row_step}, {"threshold", c.baseline.threshold}};
  return j;
}

template <typename T>
void read_into(const json& section, const char* key, T& field) {
  if (section.contains(key)) field = section.at(key).get<T>();
}

PipelineConfig from_tree(const json& j) {
  const json defaults = to_tree(PipelineConfig{});
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw std::invalid_argument("config: unknown section '" + key + "'");
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) {
        if (!defaults.at(key).contains(k2)) throw std::invalid_argument("config: unknown key '" + key + "." + k2 + "'");
      }
    }
  }

  PipelineConfig c;
  if (j.contains("mode")) c.mode = parse_decode_mode(j.at("mode").get<std::string>());
  const json empty = json::object();
  const auto& e = j.contains("extraction") ? j.at("extraction") : empty;
  read_into(e, "alpha", c.extraction.alpha);
  read_into(e, "tau_min", c.extraction.tau_min);
  read_into(e, "row_step_divisor", c.extraction.row_step_divisor);
  read_into(e, "col_span_divisor", c.extraction.col_span_divisor);
  read_into(e, "max_gap_windows", c.extraction.max_gap_windows);
  read_into(e, "max_reseeds", c.extraction.max_reseeds);
  const auto& cl = j.contains("classifier") ? j.at("classifier") : empty;
  read_into(cl, "n", c.classifier.n);
  read_into(cl, "k", c.classifier.k);
  read_into(cl, "window", c.classifier.window);
  const auto& r = j.contains("regression") ? j.at("regression") : empty;
  read_into(r, "kappa", c.regression.kappa);
  read_into(r, "min_abs_gradient", c.regression.min_abs_gradient);
  c.regression.min_points = c.classifier.n;
  const auto& t = j.contains("tracker") ? j.at("tracker") : empty;
  read_into(t, "psi_active", c.tracker.psi_active);
  read_into(t, "psi_inactive", c.tracker.psi_inactive);
  read_into(t, "match_tol_divisor", c.tracker.match_tol_divisor);
  read_into(t, "max_miss", c.tracker.max_miss);
  read_into(t, "pft_enabled", c.tracker.pft_enabled);
  read_into(t, "curve_history_length", c.tracker.curve_history_length);
  const auto& ev = j.contains("eval") ? j.at("eval") : empty;
  read_into(ev, "eval_width", c.eval.eval_width);
  read_into(ev, "gt_line_width", c.eval.gt_line_width);
  read_into(ev, "pred_line_width", c.eval.pred_line_width);
  read_into(ev, "thresholds", c.eval.thresholds);
  const auto& b = j.contains("baseline") ? j.at("baseline") : empty;
  read_into(b, "row_step", c.baseline.row_step);
  read_into(b, "threshold", c.baseline.threshold);
  c.validate();
  return c;
}

}  // namespace

std::string PipelineConfig::to_json() const { return to_tree(*this).dump(2) + "\n"; }

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  try {
    return from_tree(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) { return from_json(read_file_text(path)); }

void PipelineConfig::apply_overrides(std::span<const std::string> overrides) {
  if (overrides.empty()) return;
  json tree = to_tree(*this);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const std::string raw = o.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      tree[key] = value;
    } else {
      tree[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
  }
  try {
    *this = from_tree(tree);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config override: ") + e.what());
  }
}

}  // namespace lanekit
