#pragma once

// Discrete-time coined walk on an 8x8 position window, one coined axis per
// dimension. Eight qubits total: three position qubits and one coin qubit
// per axis. Every segment starts the walker in the middle of the window at
// cell (3, 3) with both coins in |0>, runs a fixed number of steps and
// measures once, so a segment yields one displacement in {-steps..steps}^2.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rhythmwalk/errors.hpp"
#include "rhythmwalk/statevector.hpp"

namespace rhythmwalk {

inline constexpr int kWalkQubits = 8;
inline constexpr int kAxisCells = 8;     // 3 position qubits per axis
inline constexpr int kWindowCenter = 3;  // start cell on each axis
inline constexpr int kMaxSteps = 3;      // 2*steps + 1 must fit in kAxisCells

// Register assignment. Position arrays list qubits most significant first.
struct WalkLayout {
  std::array<int, 3> x_position{0, 1, 2};
  std::array<int, 3> y_position{3, 4, 5};
  int x_coin = 6;
  int y_coin = 7;

  static WalkLayout standard() { return WalkLayout{}; }

  void validate() const {
    std::array<int, kWalkQubits> all{x_position[0], x_position[1], x_position[2],
                                     y_position[0], y_position[1], y_position[2],
                                     x_coin,        y_coin};
    std::array<bool, kWalkQubits> seen{};
    for (int q : all) {
      if (q < 0 || q >= kWalkQubits)
        throw StructuralError("layout qubit " + std::to_string(q) +
                              " out of range");
      if (seen[static_cast<std::size_t>(q)])
        throw StructuralError("layout assigns qubit " + std::to_string(q) +
                              " twice");
      seen[static_cast<std::size_t>(q)] = true;
    }
  }
};

// Coin preparation angles per axis; the coin state is RotZ(phi) RotY(theta) |0>.
struct CoinAngles {
  double phi_x = 0.0;
  double theta_x = 0.0;
  double phi_y = 0.0;
  double theta_y = 0.0;
};

struct Displacement {
  int dx = 0;
  int dy = 0;
};

struct SegmentConfig {
  int steps = kMaxSteps;
  CoinAngles angles;
  WalkLayout layout;
  int shots = 1;
  std::uint64_t seed = 0;
};

// Coin-conditioned shift of one position register: coin |1> moves the axis
// value +1 (mod 8), coin |0> moves it -1 (mod 8). The construction uses
// x + 1 = ~(~x - 1): a nearest-neighbour CNOT cascade XORs the coin into
// every position bit, a fixed three-gate core decrements, and the cascade
// undoes the conditional complement. 13 gates.
inline std::vector<Gate> build_axis_shift(const std::array<int, 3>& position,
                                          int coin) {
  const int msb = position[0], mid = position[1], lsb = position[2];
  std::vector<Gate> gates;
  gates.reserve(13);
  auto cascade = [&] {
    gates.push_back(Gate::cx(mid, lsb));
    gates.push_back(Gate::cx(msb, mid));
    gates.push_back(Gate::cx(coin, msb));
    gates.push_back(Gate::cx(msb, mid));
    gates.push_back(Gate::cx(mid, lsb));
  };
  cascade();
  gates.push_back(Gate::x(lsb));
  gates.push_back(Gate::cx(lsb, mid));
  gates.push_back(Gate::ccx(lsb, mid, msb));
  cascade();
  return gates;
}

// One walk step: Hadamard coin toss then conditional shift, per axis.
inline Circuit build_step_circuit(const WalkLayout& layout) {
  layout.validate();
  Circuit circuit{kWalkQubits, {}};
  circuit.append(Gate::h(layout.x_coin));
  circuit.append(build_axis_shift(layout.x_position, layout.x_coin));
  circuit.append(Gate::h(layout.y_coin));
  circuit.append(build_axis_shift(layout.y_position, layout.y_coin));
  return circuit;
}

// Coin state preparation applied before the first step of a segment.
inline Circuit prepare_coins(const CoinAngles& angles, const WalkLayout& layout) {
  layout.validate();
  Circuit circuit{kWalkQubits, {}};
  circuit.append(Gate::ry(layout.x_coin, angles.theta_x));
  circuit.append(Gate::rz(layout.x_coin, angles.phi_x));
  circuit.append(Gate::ry(layout.y_coin, angles.theta_y));
  circuit.append(Gate::rz(layout.y_coin, angles.phi_y));
  return circuit;
}

inline std::pair<int, int> decode_position(const Outcome& outcome,
                                           const WalkLayout& layout) {
  auto axis = [&](const std::array<int, 3>& position) {
    int v = 0;
    for (int q : position)
      v = (v << 1) | outcome.bits.at(static_cast<std::size_t>(q));
    return v;
  };
  return {axis(layout.x_position), axis(layout.y_position)};
}

namespace detail {

inline void check_steps(int steps) {
  if (steps < 0 || steps > kMaxSteps) {
    throw ConfigError("segment steps must lie in [0, " +
                      std::to_string(kMaxSteps) + "], got " +
                      std::to_string(steps) +
                      " (the walk support would wrap the position window)");
  }
}

inline std::size_t segment_start_index(const WalkLayout& layout) {
  std::size_t index = 0;
  auto set_axis = [&](const std::array<int, 3>& position, int value) {
    for (int b = 0; b < 3; ++b) {
      if ((value >> (2 - b)) & 1)
        index |= std::size_t{1} << (kWalkQubits - 1 - position[static_cast<std::size_t>(b)]);
    }
  };
  set_axis(layout.x_position, kWindowCenter);
  set_axis(layout.y_position, kWindowCenter);
  return index;  // coins stay 0
}

}  // namespace detail

// Pre-measurement state after coin preparation and `steps` walk steps.
inline StateVector segment_final_state(const SegmentConfig& config) {
  detail::check_steps(config.steps);
  config.layout.validate();
  StateVector state =
      StateVector::basis(kWalkQubits, detail::segment_start_index(config.layout));
  state = run_circuit(state, prepare_coins(config.angles, config.layout));
  const Circuit step = build_step_circuit(config.layout);
  for (int s = 0; s < config.steps; ++s) state = run_circuit(state, step);
  return state;
}

// Runs one segment and measures a single shot.
inline Displacement run_segment(const SegmentConfig& config) {
  const StateVector state = segment_final_state(config);
  const std::vector<Outcome> outcomes = sample(state, 1, config.seed);
  const auto [x, y] = decode_position(outcomes.front(), config.layout);
  return Displacement{x - kWindowCenter, y - kWindowCenter};
}

// Pre-measurement state of a single coined axis (4 qubits: positions
// 0,1,2 most significant first, coin 3) prepared at (theta, phi) and run
// for `steps` steps from the window centre.
inline StateVector axis_final_state(double theta, double phi, int steps) {
  detail::check_steps(steps);
  constexpr int kAxisQubits = 4;
  StateVector state = StateVector::basis(kAxisQubits, kWindowCenter << 1);
  Circuit prep{kAxisQubits, {}};
  prep.append(Gate::ry(3, theta));
  prep.append(Gate::rz(3, phi));
  Circuit step{kAxisQubits, {}};
  step.append(Gate::h(3));
  step.append(build_axis_shift({0, 1, 2}, 3));
  state = run_circuit(state, prep);
  for (int s = 0; s < steps; ++s) state = run_circuit(state, step);
  return state;
}

// Position marginal of a one-axis state, coin traced out.
inline std::array<double, kAxisCells> axis_position_distribution(
    const StateVector& state) {
  if (state.num_qubits() != 4)
    throw StructuralError("axis distribution expects a 4-qubit state");
  std::array<double, kAxisCells> dist{};
  for (std::size_t i = 0; i < state.dimension(); ++i)
    dist[(i >> 1) & 7] += state.probability(i);
  return dist;
}

// Same prepared state, `config.shots` measurements.
inline std::vector<Displacement> run_segment_many(const SegmentConfig& config) {
  if (config.shots < 1) throw ConfigError("shot count must be positive");
  const StateVector state = segment_final_state(config);
  const std::vector<Outcome> outcomes = sample(state, config.shots, config.seed);
  std::vector<Displacement> displacements;
  displacements.reserve(outcomes.size());
  for (const Outcome& o : outcomes) {
    const auto [x, y] = decode_position(o, config.layout);
    displacements.push_back(Displacement{x - kWindowCenter, y - kWindowCenter});
  }
  return displacements;
}

}  // namespace rhythmwalk
