#pragma once

// Trace document: the audited record of one generate run. Every segment
// keeps the full loop state (position, potential, gradient, bias, angles,
// displacement) so each stage can be replayed or plotted externally.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/feedback.hpp"
#include "rhythmwalk/rhythmspace.hpp"

namespace rhythmwalk {

struct TraceDocument {
  std::uint64_t seed = 0;
  int pixel_ratio = kDefaultPixelRatio;
  Vec2 start;
  AngleBounds bounds;
  std::vector<SegmentRecord> segments;

  PathTrace path() const {
    PathTrace trace;
    trace.positions.reserve(segments.size() + 1);
    trace.segment_index.reserve(segments.size() + 1);
    trace.positions.push_back(start);
    trace.segment_index.push_back(-1);
    for (const SegmentRecord& record : segments) {
      trace.positions.push_back(record.position_after);
      trace.segment_index.push_back(static_cast<int>(record.index));
    }
    return trace;
  }
};

namespace detail {

inline nlohmann::json record_to_json(const SegmentRecord& r) {
  return {{"index", r.index},
          {"before", vec2_to_json(r.position_before)},
          {"potential", r.potential},
          {"gradient", nlohmann::json::array({r.gradient.gx, r.gradient.gy})},
          {"bias", nlohmann::json::array({r.bias.tx, r.bias.ty})},
          {"angles",
           {{"phi_x", r.angles.phi_x},
            {"theta_x", r.angles.theta_x},
            {"phi_y", r.angles.phi_y},
            {"theta_y", r.angles.theta_y}}},
          {"displacement", nlohmann::json::array({r.displacement.dx, r.displacement.dy})},
          {"pixel_displacement", vec2_to_json(r.pixel_displacement)},
          {"after", vec2_to_json(r.position_after)}};
}

inline SegmentRecord record_from_json(const nlohmann::json& j) {
  SegmentRecord r;
  try {
    r.index = j.at("index").get<std::uint64_t>();
    r.position_before = vec2_from_json(j.at("before"), "segment before");
    r.potential = j.at("potential").get<double>();
    r.gradient = {j.at("gradient").at(0).get<double>(),
                  j.at("gradient").at(1).get<double>()};
    r.bias = {j.at("bias").at(0).get<double>(), j.at("bias").at(1).get<double>()};
    const auto& a = j.at("angles");
    r.angles.phi_x = a.at("phi_x").get<double>();
    r.angles.theta_x = a.at("theta_x").get<double>();
    r.angles.phi_y = a.at("phi_y").get<double>();
    r.angles.theta_y = a.at("theta_y").get<double>();
    r.displacement = {j.at("displacement").at(0).get<int>(),
                      j.at("displacement").at(1).get<int>()};
    r.pixel_displacement =
        vec2_from_json(j.at("pixel_displacement"), "segment pixel_displacement");
    r.position_after = vec2_from_json(j.at("after"), "segment after");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("segment record: ") + e.what());
  }
  return r;
}

}  // namespace detail

inline nlohmann::json trace_to_json(const TraceDocument& doc) {
  nlohmann::json segments = nlohmann::json::array();
  for (const SegmentRecord& r : doc.segments)
    segments.push_back(detail::record_to_json(r));
  return {{"seed", doc.seed},
          {"pixel_ratio", doc.pixel_ratio},
          {"start", detail::vec2_to_json(doc.start)},
          {"bounds",
           {{"phi_min", doc.bounds.phi_min},
            {"phi_max", doc.bounds.phi_max},
            {"theta_min", doc.bounds.theta_min},
            {"theta_max", doc.bounds.theta_max}}},
          {"segments", std::move(segments)}};
}

inline TraceDocument trace_from_json(const nlohmann::json& j) {
  TraceDocument doc;
  try {
    doc.seed = j.at("seed").get<std::uint64_t>();
    doc.pixel_ratio = j.at("pixel_ratio").get<int>();
    doc.start = detail::vec2_from_json(j.at("start"), "trace start");
    const auto& b = j.at("bounds");
    doc.bounds = AngleBounds::make(
        b.at("phi_min").get<double>(), b.at("phi_max").get<double>(),
        b.at("theta_min").get<double>(), b.at("theta_max").get<double>());
    for (const auto& rec : j.at("segments"))
      doc.segments.push_back(detail::record_from_json(rec));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trace document: ") + e.what());
  }
  return doc;
}

inline void save_trace(const std::string& path, const TraceDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << trace_to_json(doc).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

inline TraceDocument load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("trace file " + path + ": " + e.what());
  }
  return trace_from_json(doc);
}

struct TraceSummary {
  int segments = 0;
  Vec2 mean_pixel_displacement;
  Vec2 mean_cell_displacement;
  Vec2 final_position;
  std::optional<double> distance_to_center;
  // Fraction of consecutive position pairs whose angular momentum about
  // the field centre keeps the majority sign.
  std::optional<double> orbit_sign_consistency;
};

inline TraceSummary summarize(const TraceDocument& doc,
                              std::optional<Vec2> center = std::nullopt) {
  TraceSummary s;
  s.segments = static_cast<int>(doc.segments.size());
  s.final_position = doc.segments.empty() ? doc.start
                                          : doc.segments.back().position_after;
  for (const SegmentRecord& r : doc.segments) {
    s.mean_pixel_displacement =
        s.mean_pixel_displacement + r.pixel_displacement;
    s.mean_cell_displacement =
        s.mean_cell_displacement +
        Vec2{static_cast<double>(r.displacement.dx),
             static_cast<double>(r.displacement.dy)};
  }
  if (!doc.segments.empty()) {
    const double inv = 1.0 / static_cast<double>(doc.segments.size());
    s.mean_pixel_displacement = s.mean_pixel_displacement * inv;
    s.mean_cell_displacement = s.mean_cell_displacement * inv;
  }
  if (center) {
    s.distance_to_center = length(s.final_position - *center);
    const PathTrace path = doc.path();
    int positive = 0, negative = 0, total = 0;
    for (std::size_t i = 0; i + 1 < path.positions.size(); ++i) {
      const double l = cross(path.positions[i] - *center,
                             path.positions[i + 1] - path.positions[i]);
      ++total;
      if (l > 0.0) ++positive;
      else if (l < 0.0) ++negative;
    }
    if (total > 0)
      s.orbit_sign_consistency =
          static_cast<double>(std::max(positive, negative)) / total;
  }
  return s;
}

}  // namespace rhythmwalk
