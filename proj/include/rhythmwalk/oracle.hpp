#pragma once

// Independent reference implementations used to cross-check the simulator
// and the field code. The walk distribution here is computed by direct
// path summation over (displacement, coin) amplitudes on the integer line;
// it never touches the statevector kernels, so agreement between the two
// routes is meaningful evidence rather than a tautology.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/potential.hpp"
#include "rhythmwalk/statevector.hpp"
#include "rhythmwalk/walk.hpp"

namespace rhythmwalk::oracle {

// Distribution of the signed displacement of a single coined axis after a
// number of steps. probabilities[d + steps] = P(displacement = d).
struct WalkDistribution {
  int steps = 0;
  std::vector<double> probabilities;

  double probability_of(int displacement) const {
    if (displacement < -steps || displacement > steps) return 0.0;
    return probabilities[static_cast<std::size_t>(displacement + steps)];
  }

  double positive_drift() const {
    double p = 0.0;
    for (int d = 1; d <= steps; ++d) p += probability_of(d);
    return p;
  }

  double mean() const {
    double m = 0.0;
    for (int d = -steps; d <= steps; ++d) m += d * probability_of(d);
    return m;
  }
};

// Path-sum evaluation of the coined line walk. The coin starts in
// RotZ(phi) RotY(theta) |0>; each step applies a Hadamard to the coin and
// then moves the walker -1 for coin |0>, +1 for coin |1>.
inline WalkDistribution walk_distribution(double theta, double phi, int steps) {
  if (steps < 0) throw ConfigError("step count must be non-negative");
  using C = std::complex<double>;
  const int width = 2 * steps + 1;
  // amp[c][d + steps], c = coin bit
  std::vector<std::vector<C>> amp(2, std::vector<C>(static_cast<std::size_t>(width), C{0.0, 0.0}));
  amp[0][static_cast<std::size_t>(steps)] =
      std::cos(theta / 2.0) * std::exp(C{0.0, -phi / 2.0});
  amp[1][static_cast<std::size_t>(steps)] =
      std::sin(theta / 2.0) * std::exp(C{0.0, phi / 2.0});

  const double s = 1.0 / std::sqrt(2.0);
  for (int step = 0; step < steps; ++step) {
    std::vector<std::vector<C>> next(2, std::vector<C>(static_cast<std::size_t>(width), C{0.0, 0.0}));
    for (int i = 0; i < width; ++i) {
      const C a0 = amp[0][static_cast<std::size_t>(i)];
      const C a1 = amp[1][static_cast<std::size_t>(i)];
      if (a0 == C{0.0, 0.0} && a1 == C{0.0, 0.0}) continue;
      const C toss0 = s * (a0 + a1);  // coin |0>, walker moves left
      const C toss1 = s * (a0 - a1);  // coin |1>, walker moves right
      if (i - 1 >= 0) next[0][static_cast<std::size_t>(i - 1)] += toss0;
      if (i + 1 < width) next[1][static_cast<std::size_t>(i + 1)] += toss1;
    }
    amp = std::move(next);
  }

  WalkDistribution dist;
  dist.steps = steps;
  dist.probabilities.resize(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) {
    dist.probabilities[static_cast<std::size_t>(i)] =
        std::norm(amp[0][static_cast<std::size_t>(i)]) +
        std::norm(amp[1][static_cast<std::size_t>(i)]);
  }
  return dist;
}

// Closed form for the three-step positive drift, from expanding the same
// path sum symbolically: P(d > 0) = (2 - cos(theta) - sin(theta) cos(phi)) / 4.
inline double three_step_positive_drift(double theta, double phi) {
  return (2.0 - std::cos(theta) - std::sin(theta) * std::cos(phi)) / 4.0;
}

// Exact field gradients for comparison against the finite-difference path.
inline GradientVector analytic_gradient(const PotentialField& field, double x,
                                        double y) {
  return std::visit(
      [&](const auto& f) -> GradientVector {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, NullPotential>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, LinearPotential>) {
          return {0.0, f.k};
        } else {
          const double v = evaluate(field, x, y);
          return {-v * (x - f.x0) / (f.sigma_x * f.sigma_x),
                  -v * (y - f.y0) / (f.sigma_y * f.sigma_y)};
        }
      },
      field);
}

struct GradientComparison {
  double x = 0.0;
  double y = 0.0;
  GradientVector fd;
  GradientVector analytic;
  double rel_error = 0.0;
};

// Relative error of the finite-difference gradient against the closed form
// at each point; falls back to the absolute error where the exact gradient
// vanishes.
inline std::vector<GradientComparison> gradient_table(
    const PotentialField& field, const std::vector<Vec2>& points, double h) {
  std::vector<GradientComparison> rows;
  rows.reserve(points.size());
  for (const Vec2& p : points) {
    GradientComparison row;
    row.x = p.x;
    row.y = p.y;
    row.fd = gradient_fd(field, p.x, p.y, h);
    row.analytic = analytic_gradient(field, p.x, p.y);
    const double diff = std::hypot(row.fd.gx - row.analytic.gx,
                                   row.fd.gy - row.analytic.gy);
    const double scale = std::hypot(row.analytic.gx, row.analytic.gy);
    row.rel_error = scale > 1e-12 ? diff / scale : diff;
    rows.push_back(row);
  }
  return rows;
}

namespace detail {

// Box-Muller on the fully specified uniform mapping, so random states are
// reproducible everywhere.
inline double gaussian(std::mt19937_64& engine) {
  const double u1 =
      1.0 - static_cast<double>(engine() >> 11) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// Haar-ish random state: iid complex gaussian amplitudes, normalized.
inline StateVector random_state(int num_qubits, std::mt19937_64& engine) {
  std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
  double norm2 = 0.0;
  for (Amplitude& a : amps) {
    a = Amplitude{detail::gaussian(engine), detail::gaussian(engine)};
    norm2 += std::norm(a);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (Amplitude& a : amps) a *= inv;
  return StateVector(num_qubits, std::move(amps));
}

namespace detail {

// 16x16 unitary of one coined axis on qubits (pos0, pos1, pos2, coin) =
// (0, 1, 2, 3), built column by column from the 4-qubit step circuit.
inline std::vector<std::vector<Amplitude>> axis_step_matrix() {
  Circuit circuit{4, {}};
  circuit.append(Gate::h(3));
  circuit.append(build_axis_shift({0, 1, 2}, 3));
  std::vector<std::vector<Amplitude>> u(16, std::vector<Amplitude>(16));
  for (std::size_t col = 0; col < 16; ++col) {
    const StateVector out = run_circuit(StateVector::basis(4, col), circuit);
    for (std::size_t row = 0; row < 16; ++row) u[row][col] = out.amplitude(row);
  }
  return u;
}

}  // namespace detail

// Largest amplitude deviation between the full two-axis step circuit and
// the tensor product of two independent one-axis steps, over random input
// states. Checks that the axes never couple.
inline double decompose_max_deviation(int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trial count must be positive");
  const WalkLayout layout = WalkLayout::standard();
  const Circuit full = build_step_circuit(layout);
  const auto u = detail::axis_step_matrix();

  // Subsystem index extraction: x block = (x positions, x coin), y block
  // likewise, both most significant first.
  const std::array<int, 4> xq{layout.x_position[0], layout.x_position[1],
                              layout.x_position[2], layout.x_coin};
  const std::array<int, 4> yq{layout.y_position[0], layout.y_position[1],
                              layout.y_position[2], layout.y_coin};
  auto sub_index = [](std::size_t i, const std::array<int, 4>& qs) {
    std::size_t v = 0;
    for (int q : qs)
      v = (v << 1) | static_cast<std::size_t>(StateVector::bit(i, q, kWalkQubits));
    return v;
  };
  // Position of subsystem pair (r, c) back in the 8-qubit index.
  std::vector<std::size_t> full_index(256);
  for (std::size_t i = 0; i < 256; ++i)
    full_index[sub_index(i, xq) * 16 + sub_index(i, yq)] = i;

  std::mt19937_64 engine(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const StateVector psi = random_state(kWalkQubits, engine);
    const StateVector via_circuit = run_circuit(psi, full);

    // M[r][c] = amplitude of x-block r, y-block c; apply U M U^T.
    std::vector<std::vector<Amplitude>> m(16, std::vector<Amplitude>(16));
    for (std::size_t i = 0; i < 256; ++i)
      m[sub_index(i, xq)][sub_index(i, yq)] = psi.amplitude(i);
    std::vector<std::vector<Amplitude>> um(16, std::vector<Amplitude>(16));
    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t k = 0; k < 16; ++k) {
        const Amplitude urk = u[r][k];
        if (urk == Amplitude{0.0, 0.0}) continue;
        for (std::size_t c = 0; c < 16; ++c) um[r][c] += urk * m[k][c];
      }
    std::vector<std::vector<Amplitude>> umu(16, std::vector<Amplitude>(16));
    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t k = 0; k < 16; ++k) {
        const Amplitude v = um[r][k];
        if (v == Amplitude{0.0, 0.0}) continue;
        for (std::size_t c = 0; c < 16; ++c) umu[r][c] += v * u[c][k];
      }

    for (std::size_t r = 0; r < 16; ++r)
      for (std::size_t c = 0; c < 16; ++c) {
        const double dev =
            std::abs(umu[r][c] - via_circuit.amplitude(full_index[r * 16 + c]));
        if (dev > worst) worst = dev;
      }
  }
  return worst;
}

}  // namespace rhythmwalk::oracle
