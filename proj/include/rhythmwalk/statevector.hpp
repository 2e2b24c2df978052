#pragma once

// Dense statevector simulator, sized for the 8-qubit circuits used by the
// walk generator. Amplitudes are stored as one contiguous vector indexed by
// basis state.
//
// Qubit ordering convention: qubit 0 is the MOST significant bit of the
// basis index. A ket written |q0 q1 ... q_{n-1}> therefore reads the same
// left to right as the binary expansion of its index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rhythmwalk/errors.hpp"

namespace rhythmwalk {

using Amplitude = std::complex<double>;

inline constexpr double kSampleNormTolerance = 1e-8;

class StateVector {
 public:
  StateVector(int num_qubits, std::vector<Amplitude> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits_ < 1 || num_qubits_ > 24) {
      throw StructuralError("state must have between 1 and 24 qubits, got " +
                            std::to_string(num_qubits_));
    }
    if (amps_.size() != (std::size_t{1} << num_qubits_)) {
      throw StructuralError("amplitude vector has " +
                            std::to_string(amps_.size()) + " entries, expected " +
                            std::to_string(std::size_t{1} << num_qubits_));
    }
  }

  // |00...0>
  static StateVector zero(int num_qubits) { return basis(num_qubits, 0); }

  // Basis state with the given index under the MSB-first convention.
  static StateVector basis(int num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > 24) {
      throw StructuralError("state must have between 1 and 24 qubits, got " +
                            std::to_string(num_qubits));
    }
    std::vector<Amplitude> amps(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
    if (index >= amps.size()) {
      throw StructuralError("basis index " + std::to_string(index) +
                            " out of range for " + std::to_string(num_qubits) +
                            " qubits");
    }
    amps[index] = Amplitude{1.0, 0.0};
    return StateVector(num_qubits, std::move(amps));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  std::vector<Amplitude>& amplitudes() { return amps_; }
  Amplitude amplitude(std::size_t index) const { return amps_.at(index); }

  double norm() const {
    double s = 0.0;
    for (const Amplitude& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  double probability(std::size_t index) const { return std::norm(amps_.at(index)); }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps_.size());
    for (std::size_t i = 0; i < amps_.size(); ++i) p[i] = std::norm(amps_[i]);
    return p;
  }

  // Value of qubit q in basis index i (MSB-first).
  static int bit(std::size_t index, int qubit, int num_qubits) {
    return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1u);
  }

 private:
  int num_qubits_;
  std::vector<Amplitude> amps_;
};

enum class GateKind { PauliX, Hadamard, RotY, RotZ, ControlledX };

// One primitive gate. `angle` is only meaningful for the rotations and
// `controls` only for ControlledX (one control = CNOT, two = Toffoli).
struct Gate {
  GateKind kind = GateKind::PauliX;
  int target = 0;
  double angle = 0.0;
  std::vector<int> controls;

  static Gate x(int target) { return Gate{GateKind::PauliX, target, 0.0, {}}; }
  static Gate h(int target) { return Gate{GateKind::Hadamard, target, 0.0, {}}; }
  static Gate ry(int target, double theta) {
    return Gate{GateKind::RotY, target, theta, {}};
  }
  static Gate rz(int target, double phi) {
    return Gate{GateKind::RotZ, target, phi, {}};
  }
  static Gate cx(int control, int target) {
    return Gate{GateKind::ControlledX, target, 0.0, {control}};
  }
  static Gate ccx(int control_a, int control_b, int target) {
    return Gate{GateKind::ControlledX, target, 0.0, {control_a, control_b}};
  }

  Gate inverse() const {
    Gate g = *this;
    if (kind == GateKind::RotY || kind == GateKind::RotZ) g.angle = -angle;
    return g;  // X, H and controlled X are involutions
  }
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  void append(Gate gate) { gates.push_back(std::move(gate)); }
  void append(const std::vector<Gate>& more) {
    gates.insert(gates.end(), more.begin(), more.end());
  }

  Circuit inverse() const {
    Circuit inv{num_qubits, {}};
    inv.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it)
      inv.gates.push_back(it->inverse());
    return inv;
  }
};

namespace detail {

inline void check_qubit(int qubit, int num_qubits, const char* role) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw StructuralError(std::string(role) + " qubit " + std::to_string(qubit) +
                          " out of range for " + std::to_string(num_qubits) +
                          " qubits");
  }
}

// Dense 2x2 update on the target qubit: row-major u = {u00, u01, u10, u11}.
inline void apply_single_qubit(std::vector<Amplitude>& amps, int num_qubits,
                               int target, const Amplitude u[4]) {
  const std::size_t stride = std::size_t{1} << (num_qubits - 1 - target);
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      Amplitude& a0 = amps[base + off];
      Amplitude& a1 = amps[base + off + stride];
      const Amplitude v0 = a0;
      const Amplitude v1 = a1;
      a0 = u[0] * v0 + u[1] * v1;
      a1 = u[2] * v0 + u[3] * v1;
    }
  }
}

}  // namespace detail

inline StateVector apply_gate(const StateVector& state, const Gate& gate) {
  const int n = state.num_qubits();
  detail::check_qubit(gate.target, n, "target");
  std::vector<Amplitude> amps = state.amplitudes();

  switch (gate.kind) {
    case GateKind::Hadamard: {
      const double s = 1.0 / std::sqrt(2.0);
      const Amplitude u[4] = {{s, 0}, {s, 0}, {s, 0}, {-s, 0}};
      detail::apply_single_qubit(amps, n, gate.target, u);
      break;
    }
    case GateKind::RotY: {
      const double c = std::cos(gate.angle / 2.0);
      const double s = std::sin(gate.angle / 2.0);
      const Amplitude u[4] = {{c, 0}, {-s, 0}, {s, 0}, {c, 0}};
      detail::apply_single_qubit(amps, n, gate.target, u);
      break;
    }
    case GateKind::RotZ: {
      const Amplitude lo = std::exp(Amplitude{0.0, -gate.angle / 2.0});
      const Amplitude hi = std::exp(Amplitude{0.0, gate.angle / 2.0});
      const Amplitude u[4] = {lo, {0, 0}, {0, 0}, hi};
      detail::apply_single_qubit(amps, n, gate.target, u);
      break;
    }
    case GateKind::PauliX:
    case GateKind::ControlledX: {
      std::size_t control_mask = 0;
      for (int c : gate.controls) {
        detail::check_qubit(c, n, "control");
        if (c == gate.target) {
          throw StructuralError("control equals target qubit " + std::to_string(c));
        }
        const std::size_t m = std::size_t{1} << (n - 1 - c);
        if (control_mask & m) {
          throw StructuralError("duplicate control qubit " + std::to_string(c));
        }
        control_mask |= m;
      }
      if (gate.kind == GateKind::PauliX && !gate.controls.empty()) {
        throw StructuralError("plain X gate cannot carry controls");
      }
      const std::size_t target_mask = std::size_t{1} << (n - 1 - gate.target);
      for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & target_mask) == 0 && (i & control_mask) == control_mask) {
          std::swap(amps[i], amps[i | target_mask]);
        }
      }
      break;
    }
  }
  return StateVector(n, std::move(amps));
}

inline StateVector run_circuit(const StateVector& state, const Circuit& circuit) {
  if (circuit.num_qubits != state.num_qubits()) {
    throw StructuralError("circuit is sized for " +
                          std::to_string(circuit.num_qubits) +
                          " qubits but the state has " +
                          std::to_string(state.num_qubits()));
  }
  StateVector out = state;
  for (const Gate& g : circuit.gates) out = apply_gate(out, g);
  return out;
}

// One full-register measurement outcome, bits[q] = value of qubit q.
struct Outcome {
  std::vector<std::uint8_t> bits;
  std::size_t index = 0;
};

namespace detail {

// Fixed-width uniform double in [0, 1) built from the top 53 bits of the
// engine output. std::mt19937_64 plus this mapping is fully specified by
// the standard, so sampled artifacts are identical across platforms.
inline double uniform_unit(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Born-rule sampling of full basis-state measurements.
inline std::vector<Outcome> sample(const StateVector& state, int shots,
                                   std::uint64_t seed) {
  if (shots < 0) throw ConfigError("shot count must be non-negative");
  const std::vector<double> probs = state.probabilities();
  std::vector<double> cumulative(probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    total += probs[i];
    cumulative[i] = total;
  }
  if (std::abs(total - 1.0) > kSampleNormTolerance) {
    throw NumericalError("state norm drifted: probabilities sum to " +
                         std::to_string(total));
  }
  for (double& c : cumulative) c /= total;
  cumulative.back() = 1.0;

  std::mt19937_64 engine(seed);
  const int n = state.num_qubits();
  std::vector<Outcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(shots));
  for (int s = 0; s < shots; ++s) {
    const double u = detail::uniform_unit(engine);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t index =
        static_cast<std::size_t>(std::distance(cumulative.begin(), it));
    Outcome o;
    o.index = index;
    o.bits.resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
      o.bits[static_cast<std::size_t>(q)] =
          static_cast<std::uint8_t>(StateVector::bit(index, q, n));
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

}  // namespace rhythmwalk
