#pragma once

// Run configuration: one JSON document drives every scenario (field,
// kinematics, bounds or calibration, pixel ratio, anchor set, timing grid).
// Defaults follow the reference setup: pixel ratio 10, 3-step segments,
// linear slope 1, Gaussian amplitude 100 with sigma 100, inertial mass 10
// with dt 0.52.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include <json.hpp>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/feedback.hpp"
#include "rhythmwalk/potential.hpp"
#include "rhythmwalk/rhythmspace.hpp"
#include "rhythmwalk/sonification.hpp"
#include "rhythmwalk/walk.hpp"

namespace rhythmwalk {

using BoundsSpec = std::variant<AngleBounds, CalibrationSpec>;

struct RunConfig {
  std::uint64_t seed = 42;
  int segments = 200;
  Vec2 start{250.0, 250.0};
  PotentialField field = NullPotential{};
  KinematicsMode mode = DirectMode{};
  Vec2 initial_velocity{0.0, 0.0};
  BoundsSpec bounds = CalibrationSpec{};
  int pixel_ratio = kDefaultPixelRatio;
  std::string space = "builtin";  // or a path to an anchor file
  TimingGrid grid;
  int slots = 16;
  bool sign_flip = false;
  double fd_step = 1.0;
  std::optional<double> gradient_scale;  // default: field's analytic maximum
  int steps = kMaxSteps;

  void validate() const {
    if (segments < 1) throw ConfigError("segments must be positive");
    if (pixel_ratio < 1) throw ConfigError("pixel_ratio must be >= 1");
    if (slots < 1) throw ConfigError("slots must be positive");
    if (steps < 0 || steps > kMaxSteps)
      throw ConfigError("steps must lie in [0, " + std::to_string(kMaxSteps) +
                        "]");
    if (start.x < 0.0 || start.x > kSpaceSize || start.y < 0.0 ||
        start.y > kSpaceSize)
      throw ConfigError("start position must lie inside the 500x500 space");
    if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
    if (gradient_scale && !(*gradient_scale > 0.0))
      throw ConfigError("gradient_scale must be positive");
    if (const auto* g = std::get_if<GaussianPotential>(&field)) {
      if (!(g->sigma_x > 0.0) || !(g->sigma_y > 0.0))
        throw ConfigError("gaussian sigma must be positive");
    }
    if (const auto* inertial = std::get_if<InertialMode>(&mode)) {
      if (!(inertial->mass > 0.0)) throw ConfigError("mass must be positive");
      if (!(inertial->dt > 0.0)) throw ConfigError("dt must be positive");
    }
    if (const auto* cal = std::get_if<CalibrationSpec>(&bounds)) cal->validate();
    grid.validate();
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.contains(key))
      throw ParseError("unknown key \"" + key + "\" in " + where);
  }
}

inline Vec2 vec2_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ParseError(where + " must be a [x, y] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json vec2_to_json(Vec2 v) {
  return nlohmann::json::array({v.x, v.y});
}

inline PotentialField field_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw ParseError("field needs a \"type\"");
  const std::string type = j.at("type").get<std::string>();
  if (type == "null") {
    reject_unknown_keys(j, {"type"}, "field");
    return NullPotential{};
  }
  if (type == "linear") {
    reject_unknown_keys(j, {"type", "k"}, "field");
    LinearPotential f;
    if (j.contains("k")) f.k = j.at("k").get<double>();
    return f;
  }
  if (type == "gaussian") {
    reject_unknown_keys(j, {"type", "v0", "x0", "y0", "sigma_x", "sigma_y"},
                        "field");
    GaussianPotential f;
    if (j.contains("v0")) f.v0 = j.at("v0").get<double>();
    if (j.contains("x0")) f.x0 = j.at("x0").get<double>();
    if (j.contains("y0")) f.y0 = j.at("y0").get<double>();
    if (j.contains("sigma_x")) f.sigma_x = j.at("sigma_x").get<double>();
    if (j.contains("sigma_y")) f.sigma_y = j.at("sigma_y").get<double>();
    return f;
  }
  throw ParseError("unknown field type \"" + type + "\"");
}

inline nlohmann::json field_to_json(const PotentialField& field) {
  return std::visit(
      [](const auto& f) -> nlohmann::json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NullPotential>) {
          return {{"type", "null"}};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return {{"type", "linear"}, {"k", f.k}};
        } else {
          return {{"type", "gaussian"},   {"v0", f.v0},
                  {"x0", f.x0},           {"y0", f.y0},
                  {"sigma_x", f.sigma_x}, {"sigma_y", f.sigma_y}};
        }
      },
      field);
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  detail::reject_unknown_keys(
      doc,
      {"seed", "segments", "start", "field", "mode", "bounds", "pixel_ratio",
       "space", "grid", "sign_flip", "fd_step", "gradient_scale", "steps"},
      "config");
  RunConfig c;
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("segments")) c.segments = doc.at("segments").get<int>();
  if (doc.contains("start"))
    c.start = detail::vec2_from_json(doc.at("start"), "start");
  if (doc.contains("field")) c.field = detail::field_from_json(doc.at("field"));
  if (doc.contains("mode")) {
    const auto& m = doc.at("mode");
    if (!m.is_object() || !m.contains("type"))
      throw ParseError("mode needs a \"type\"");
    const std::string type = m.at("type").get<std::string>();
    if (type == "direct") {
      detail::reject_unknown_keys(m, {"type"}, "mode");
      c.mode = DirectMode{};
    } else if (type == "inertial") {
      detail::reject_unknown_keys(m, {"type", "mass", "dt", "initial_velocity"},
                                  "mode");
      InertialMode im;
      if (m.contains("mass")) im.mass = m.at("mass").get<double>();
      if (m.contains("dt")) im.dt = m.at("dt").get<double>();
      if (m.contains("initial_velocity"))
        c.initial_velocity =
            detail::vec2_from_json(m.at("initial_velocity"), "initial_velocity");
      c.mode = im;
    } else {
      throw ParseError("unknown mode \"" + type + "\"");
    }
  }
  if (doc.contains("bounds")) {
    const auto& b = doc.at("bounds");
    if (!b.is_object()) throw ParseError("bounds must be an object");
    if (b.contains("calibrate")) {
      detail::reject_unknown_keys(b, {"calibrate"}, "bounds");
      const auto& cal = b.at("calibrate");
      detail::reject_unknown_keys(
          cal, {"target", "learning_rate", "max_iterations", "tolerance"},
          "bounds.calibrate");
      CalibrationSpec spec;
      if (cal.contains("target"))
        spec.target_drift_probability = cal.at("target").get<double>();
      if (cal.contains("learning_rate"))
        spec.learning_rate = cal.at("learning_rate").get<double>();
      if (cal.contains("max_iterations"))
        spec.max_iterations = cal.at("max_iterations").get<int>();
      if (cal.contains("tolerance"))
        spec.tolerance = cal.at("tolerance").get<double>();
      c.bounds = spec;
    } else {
      detail::reject_unknown_keys(
          b, {"phi_min", "phi_max", "theta_min", "theta_max"}, "bounds");
      c.bounds = AngleBounds::make(
          b.at("phi_min").get<double>(), b.at("phi_max").get<double>(),
          b.at("theta_min").get<double>(), b.at("theta_max").get<double>());
    }
  }
  if (doc.contains("pixel_ratio"))
    c.pixel_ratio = doc.at("pixel_ratio").get<int>();
  if (doc.contains("space")) c.space = doc.at("space").get<std::string>();
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    detail::reject_unknown_keys(g, {"tempo_bpm", "ppq", "resolution", "slots"},
                                "grid");
    if (g.contains("tempo_bpm"))
      c.grid.tempo_bpm = g.at("tempo_bpm").get<double>();
    if (g.contains("ppq")) c.grid.ppq = g.at("ppq").get<int>();
    if (g.contains("resolution"))
      c.grid.resolution = g.at("resolution").get<int>();
    if (g.contains("slots")) c.slots = g.at("slots").get<int>();
  }
  if (doc.contains("sign_flip")) c.sign_flip = doc.at("sign_flip").get<bool>();
  if (doc.contains("fd_step")) c.fd_step = doc.at("fd_step").get<double>();
  if (doc.contains("gradient_scale") && !doc.at("gradient_scale").is_null())
    c.gradient_scale = doc.at("gradient_scale").get<double>();
  if (doc.contains("steps")) c.steps = doc.at("steps").get<int>();
  c.validate();
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json doc;
  doc["seed"] = c.seed;
  doc["segments"] = c.segments;
  doc["start"] = detail::vec2_to_json(c.start);
  doc["field"] = detail::field_to_json(c.field);
  if (const auto* inertial = std::get_if<InertialMode>(&c.mode)) {
    doc["mode"] = {{"type", "inertial"},
                   {"mass", inertial->mass},
                   {"dt", inertial->dt},
                   {"initial_velocity", detail::vec2_to_json(c.initial_velocity)}};
  } else {
    doc["mode"] = {{"type", "direct"}};
  }
  if (const auto* cal = std::get_if<CalibrationSpec>(&c.bounds)) {
    doc["bounds"] = {{"calibrate",
                      {{"target", cal->target_drift_probability},
                       {"learning_rate", cal->learning_rate},
                       {"max_iterations", cal->max_iterations},
                       {"tolerance", cal->tolerance}}}};
  } else {
    const auto& b = std::get<AngleBounds>(c.bounds);
    doc["bounds"] = {{"phi_min", b.phi_min},
                     {"phi_max", b.phi_max},
                     {"theta_min", b.theta_min},
                     {"theta_max", b.theta_max}};
  }
  doc["pixel_ratio"] = c.pixel_ratio;
  doc["space"] = c.space;
  doc["grid"] = {{"tempo_bpm", c.grid.tempo_bpm},
                 {"ppq", c.grid.ppq},
                 {"resolution", c.grid.resolution},
                 {"slots", c.slots}};
  doc["sign_flip"] = c.sign_flip;
  doc["fd_step"] = c.fd_step;
  if (c.gradient_scale) doc["gradient_scale"] = *c.gradient_scale;
  doc["steps"] = c.steps;
  return doc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file " + path + ": " + e.what());
  }
}

}  // namespace rhythmwalk
