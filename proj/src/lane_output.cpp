#include "lanekit/lane_output.hpp"

#include <json.hpp>

#include <fstream>

namespace lanekit {

using ojson = nlohmann::ordered_json;

namespace {

const char* kind_of(const LaneShape& shape) {
  switch (shape.index()) {
    case 0: return "straight";
    case 1: return "curved";
    default: return "cubic";
  }
}

ojson xy(double x, double y) { return ojson::array({x, y}); }

}  // namespace

std::string format_lane_output(std::span<const LaneMarking> lanes, const LaneOutputOptions& opts) {
  ojson doc;
  doc["format"] = "lanekit-lanes";
  doc["version"] = 1;
  doc["frame_id"] = opts.frame_id;
  doc["count"] = lanes.size();
  doc["lanes"] = ojson::array();
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const LaneMarking& lane = lanes[i];
    ojson rec;
    rec["index"] = i;
    rec["kind"] = kind_of(lane.shape);
    rec["side"] = lane.side ? ojson(to_string(*lane.side)) : ojson(nullptr);
    rec["channel"] = lane.channel_id;
    if (const auto* s = std::get_if<StraightLine>(&lane.shape)) {
      if (s->vertical_x) {
        rec["vertical_x"] = *s->vertical_x;
      } else {
        rec["beta0"] = s->beta0;
        rec["beta1"] = s->beta1;
      }
    } else {
      const auto& knots = std::visit(
          [](const auto& c) -> const std::vector<Point2>& {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, StraightLine>) {
              static const std::vector<Point2> none;
              return none;
            } else {
              return c.knots();
            }
          },
          lane.shape);
      ojson k = ojson::array();
      // Stored bottom-first like every other point list.
      for (auto it = knots.rbegin(); it != knots.rend(); ++it) k.push_back(xy(it->x, it->y));
      rec["knots"] = k;
    }
    ojson pts = ojson::array();
    if (opts.sample_rows.empty()) {
      for (const auto& p : lane.sample_rows()) pts.push_back(xy(p.x, p.y));
    } else {
      for (double y : opts.sample_rows) pts.push_back(xy(lane.x_at(y), y));
    }
    rec["points"] = pts;
    doc["lanes"].push_back(rec);
  }
  return doc.dump(1) + "\n";
}

void write_lane_output(std::span<const LaneMarking> lanes, const std::filesystem::path& path,
                       const LaneOutputOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << format_lane_output(lanes, opts);
  if (!out) throw DataError("write failed on " + path.string());
}

LaneShape LaneRecord::shape() const {
  if (kind == "straight") return vertical_x ? StraightLine::vertical(*vertical_x) : StraightLine{beta0, beta1, {}};
  std::vector<LanePoint> pts;
  pts.reserve(knots.size());
  for (const auto& k : knots) pts.push_back({k.x, k.y, 1.0});
  if (kind == "curved") return QuadraticSpline(pts);
  return CubicSpline(pts);
}

LaneFile parse_lane_output(const std::string& text) {
  LaneFile file;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("format") != "lanekit-lanes") throw DataError("not a lane output file");
    file.frame_id = doc.at("frame_id").get<std::int64_t>();
    for (const auto& rec : doc.at("lanes")) {
      LaneRecord r;
      r.kind = rec.at("kind").get<std::string>();
      if (!rec.at("side").is_null()) r.side = rec.at("side") == "left" ? Side::Left : Side::Right;
      r.channel = rec.at("channel").get<int>();
      if (r.kind == "straight") {
        if (rec.contains("vertical_x")) {
          r.vertical_x = rec.at("vertical_x").get<double>();
        } else {
          r.beta0 = rec.at("beta0").get<double>();
          r.beta1 = rec.at("beta1").get<double>();
        }
      } else {
        for (const auto& k : rec.at("knots")) r.knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
      }
      for (const auto& p : rec.at("points")) r.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      file.lanes.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed lane output: ") + e.what());
  }
  return file;
}

}  // namespace lanekit
