#pragma once

// Glue between a RunConfig and the modules: resolve bounds (calibrating if
// asked), run the feedback loop, and sonify traces. The CLI is a thin shell
// over these calls, which keeps every pipeline stage testable in-process.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rhythmwalk/config.hpp"
#include "rhythmwalk/feedback.hpp"
#include "rhythmwalk/sonification.hpp"
#include "rhythmwalk/trace.hpp"

namespace rhythmwalk {

inline AngleBounds resolve_bounds(
    const BoundsSpec& spec, std::optional<CalibrationResult>* calibration_out) {
  if (const auto* fixed = std::get_if<AngleBounds>(&spec)) {
    if (calibration_out) calibration_out->reset();
    return *fixed;
  }
  const CalibrationResult result =
      calibrate_bounds(std::get<CalibrationSpec>(spec));
  if (calibration_out) *calibration_out = result;
  return result.bounds;
}

inline RhythmSpace resolve_space(const RunConfig& config) {
  if (config.space == "builtin") return builtin_space();
  return load_space(config.space);
}

inline std::optional<Vec2> field_center(const PotentialField& field) {
  if (const auto* g = std::get_if<GaussianPotential>(&field))
    return Vec2{g->x0, g->y0};
  return std::nullopt;
}

struct GenerateResult {
  TraceDocument trace;
  std::optional<CalibrationResult> calibration;
  TraceSummary summary;
};

inline GenerateResult run_generate(const RunConfig& config) {
  config.validate();
  GenerateResult out;
  const AngleBounds bounds = resolve_bounds(config.bounds, &out.calibration);

  WalkerSession session;
  session.kinematics.position = config.start;
  session.kinematics.mode = config.mode;
  if (std::holds_alternative<InertialMode>(config.mode))
    session.kinematics.velocity = config.initial_velocity;
  session.field = config.field;
  session.bounds = bounds;
  session.segment_template.steps = config.steps;
  session.pixel_ratio = config.pixel_ratio;
  session.gradient_scale =
      config.gradient_scale.value_or(default_gradient_scale(config.field));
  session.fd_step = config.fd_step;
  session.sign_flip = config.sign_flip;
  session.seed = config.seed;

  out.trace.seed = config.seed;
  out.trace.pixel_ratio = config.pixel_ratio;
  out.trace.start = session.kinematics.position;
  out.trace.bounds = bounds;
  out.trace.segments.reserve(static_cast<std::size_t>(config.segments));
  for (int i = 0; i < config.segments; ++i) {
    AdvanceResult step = advance(session);
    session = std::move(step.session);
    out.trace.segments.push_back(step.record);
  }
  out.summary = summarize(out.trace, field_center(config.field));
  return out;
}

struct SonifyResult {
  std::vector<Vec2> points;
  GlobalSequence sequence;
  MidiDocument midi;
};

inline SonifyResult run_sonify(const TraceDocument& trace,
                               const RunConfig& config) {
  config.grid.validate();
  const RhythmSpace space = resolve_space(config);
  SonifyResult out;
  out.points = resample_path(trace.path(), config.slots);
  out.sequence = build_sequence(out.points, space);
  out.midi = encode_midi(out.sequence, config.grid);
  return out;
}

}  // namespace rhythmwalk
