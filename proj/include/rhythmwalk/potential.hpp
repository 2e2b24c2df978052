#pragma once

// Scalar potential fields over the 500x500 pixel plane, finite-difference
// gradients, and the two kinematic modes that turn walk displacements into
// walker motion.

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "rhythmwalk/errors.hpp"

namespace rhythmwalk {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }

struct NullPotential {};

// V(x, y) = k * y
struct LinearPotential {
  double k = 1.0;
};

// V(x, y) = v0 * exp(-((x-x0)^2 / (2 sx^2) + (y-y0)^2 / (2 sy^2)))
struct GaussianPotential {
  double v0 = 100.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double sigma_x = 100.0;
  double sigma_y = 100.0;
};

using PotentialField = std::variant<NullPotential, LinearPotential, GaussianPotential>;

inline double evaluate(const PotentialField& field, double x, double y) {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NullPotential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return f.k * y;
        } else {
          const double ux = (x - f.x0) / f.sigma_x;
          const double uy = (y - f.y0) / f.sigma_y;
          return f.v0 * std::exp(-0.5 * (ux * ux + uy * uy));
        }
      },
      field);
}

struct GradientVector {
  double gx = 0.0;
  double gy = 0.0;
};

// Central differences with step h (in pixels).
inline GradientVector gradient_fd(const PotentialField& field, double x, double y,
                                  double h = 1.0) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  GradientVector g;
  g.gx = (evaluate(field, x + h, y) - evaluate(field, x - h, y)) / (2.0 * h);
  g.gy = (evaluate(field, x, y + h) - evaluate(field, x, y - h)) / (2.0 * h);
  return g;
}

struct NormalizedBias {
  double tx = 0.5;
  double ty = 0.5;
};

// Maps a gradient component g to t = clamp(1/2 - g / (2 g_max), 0, 1).
// Zero gradient gives the unbiased midpoint 1/2; a positive component
// pushes t below 1/2, i.e. the walk drifts downhill.
inline NormalizedBias normalize_bias(const GradientVector& gradient, double g_max) {
  if (!(g_max > 0.0))
    throw ConfigError("gradient scale must be positive, got " +
                      std::to_string(g_max));
  auto component = [&](double g) {
    return std::clamp(0.5 - g / (2.0 * g_max), 0.0, 1.0);
  };
  return NormalizedBias{component(gradient.gx), component(gradient.gy)};
}

// Default normalization scale: the largest gradient magnitude a single
// component of the field can take (1 for the empty field so the bias map
// stays defined).
inline double default_gradient_scale(const PotentialField& field) {
  return std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NullPotential>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return f.k == 0.0 ? 1.0 : std::abs(f.k);
        } else {
          // max of |d/du (v0 e^{-u^2/2})| = |v0| e^{-1/2}, reached one sigma
          // from the centre along the tighter axis.
          const double s = std::min(std::abs(f.sigma_x), std::abs(f.sigma_y));
          if (s == 0.0 || f.v0 == 0.0) return 1.0;
          return std::abs(f.v0) / s * std::exp(-0.5);
        }
      },
      field);
}

struct DirectMode {};

struct InertialMode {
  double mass = 10.0;
  double dt = 0.52;
};

using KinematicsMode = std::variant<DirectMode, InertialMode>;

struct KinematicState {
  Vec2 position;
  Vec2 velocity;
  KinematicsMode mode;
};

// Adds a pixel displacement to the position. In direct mode this is the
// whole motion model; in inertial mode it perturbs the ballistic path.
inline KinematicState apply_displacement(KinematicState state, Vec2 delta) {
  state.position = state.position + delta;
  return state;
}

// Inertial update v += a dt, p += v dt. Rejected in direct mode so a
// mismatched configuration cannot silently behave like a different model.
inline KinematicState integrate_inertia(KinematicState state, Vec2 acceleration) {
  const auto* inertial = std::get_if<InertialMode>(&state.mode);
  if (inertial == nullptr)
    throw StructuralError("inertial update requested in direct mode");
  if (!(inertial->mass > 0.0)) throw ConfigError("mass must be positive");
  if (!(inertial->dt > 0.0)) throw ConfigError("time step must be positive");
  state.velocity = state.velocity + acceleration * inertial->dt;
  state.position = state.position + state.velocity * inertial->dt;
  return state;
}

}  // namespace rhythmwalk
