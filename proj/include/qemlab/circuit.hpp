// Copyright 2026 The qemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qemlab/pauli.hpp"

namespace qemlab {

enum class GateKind {
  H,
  S,
  Sdg,
  X,
  SqrtX,
  SqrtXdg,
  Rz,
  Ry,
  CNOT,
  CPhase,
  SWAP,
  Barrier,
};

std::string_view gate_name(GateKind kind);
GateKind parse_gate_kind(std::string_view name);
int gate_arity(GateKind kind);
bool gate_has_angle(GateKind kind);

/// One gate application. For CNOT and CPhase qubits[0] is the control.
struct Gate {
  GateKind kind = GateKind::Barrier;
  std::array<int, 2> qubits{-1, -1};
  double angle = 0.0;

  int arity() const { return gate_arity(kind); }
  bool is_two_qubit() const { return arity() == 2; }

  static Gate one(GateKind kind, int q, double angle = 0.0);
  static Gate two(GateKind kind, int a, int b, double angle = 0.0);
  static Gate barrier();

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// 2x2 or 4x4 unitary of a gate. Two-qubit matrices index the basis as
/// |q0 q1> with qubits[0] the more significant bit.
Eigen::MatrixXcd gate_matrix(const Gate& g);

/// Ordered gate list over a fixed register.
class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int n_qubits);

  int n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  /// Measured qubits, ascending. Defaults to every qubit.
  const std::vector<int>& measured_qubits() const { return measured_; }

  Circuit& add(const Gate& g);
  Circuit& h(int q) { return add(Gate::one(GateKind::H, q)); }
  Circuit& s(int q) { return add(Gate::one(GateKind::S, q)); }
  Circuit& sdg(int q) { return add(Gate::one(GateKind::Sdg, q)); }
  Circuit& x(int q) { return add(Gate::one(GateKind::X, q)); }
  Circuit& sx(int q) { return add(Gate::one(GateKind::SqrtX, q)); }
  Circuit& rz(int q, double theta) { return add(Gate::one(GateKind::Rz, q, theta)); }
  Circuit& ry(int q, double theta) { return add(Gate::one(GateKind::Ry, q, theta)); }
  Circuit& cnot(int c, int t) { return add(Gate::two(GateKind::CNOT, c, t)); }
  Circuit& cphase(int c, int t, double theta) {
    return add(Gate::two(GateKind::CPhase, c, t, theta));
  }
  Circuit& swap(int a, int b) { return add(Gate::two(GateKind::SWAP, a, b)); }
  Circuit& barrier() { return add(Gate::barrier()); }
  Circuit& append(const Circuit& other);

  void set_measured_qubits(std::vector<int> qubits);

  std::size_t count(GateKind kind) const;
  std::size_t two_qubit_count() const;

 private:
  int n_ = 0;
  std::vector<Gate> gates_;
  std::vector<int> measured_;
};

/// Dense unitary of a circuit (barriers ignored), n <= 10.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

/// Statevector U|0...0>.
StateVector simulate_statevector(const Circuit& c);

/// Applies one gate to a statevector in place.
void apply_gate(const Gate& g, int n_qubits, StateVector& psi);

/// min over global phases of ||a - e^{iφ} b||_max.
double distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Reverse order with every gate replaced by its inverse.
Circuit invert(const Circuit& c);

/// Each SWAP becomes CNOT(a,b) CNOT(b,a) CNOT(a,b).
Circuit decompose_swaps(const Circuit& c);

enum class AnsatzForm {
  /// Each rotation emitted as SqrtX · Rz(θ) · SqrtX, the sequence executed on
  /// hardware. This is the parametrization the reference angles belong to.
  Native,
  /// Each rotation emitted as Ry(θ); identity at θ = 0.
  RyGates,
};

/// Wire labels of the 3-qubit hardware-efficient ansatz.
inline constexpr int kAnsatzQubitA = 0;
inline constexpr int kAnsatzQubitB = 1;
inline constexpr int kAnsatzQubitC = 2;

/// Two rotation layers around CNOT(b→c), CNOT(c→a). params[0..2] rotate
/// c, b, a in the first layer and params[3..5] in the second.
Circuit build_ansatz(std::span<const double> params,
                     AnsatzForm form = AnsatzForm::Native);

/// Reference optimum of the native-form ansatz.
inline constexpr std::array<double, 6> kReferenceAnsatzParams{
    -0.06492667, 2.89836152, 0.26373807, -0.06709062, 0.01006833, -0.26585046};

/// H on qubit 0 then a CNOT chain along 0-1-...-(n-1).
Circuit build_ghz(int n);

/// Replaces each CNOT by H(t) [Rz(θ/2)_c CNOT Rz(-θ/2)_t CNOT Rz(θ/2)_t]^λ H(t)
/// with θ = π/λ: λ copies of the λ-th root of CNOT, already lowered to CNOTs.
/// No other gate is touched and no simplification is performed.
Circuit amplify_noise(const Circuit& c, int lambda);

/// Undirected coupling graph over physical qubits.
class CouplingMap {
 public:
  CouplingMap() = default;
  CouplingMap(int n_physical, std::vector<std::pair<int, int>> edges);

  int n_physical() const { return n_; }
  bool connected(int a, int b) const;
  const std::set<std::pair<int, int>>& edges() const { return edges_; }

  /// q0-q1, q1-q2, q2-q3, q1-q4: the five-qubit heavy-hex fragment that hosts
  /// every ancilla readout of the 3-qubit problem.
  static CouplingMap dsp_cluster();
  /// Simple path 0-1-...-(n-1).
  static CouplingMap line(int n);

 private:
  int n_ = 0;
  std::set<std::pair<int, int>> edges_;
};

/// Output of build_dsp_circuit.
struct DspCircuit {
  /// System qubits 0..n-1 plus the ancilla n. All qubits are measured.
  Circuit circuit;
  int ancilla = 0;
  /// Logical qubit -> physical qubit; empty for all-to-all.
  std::vector<int> layout;
  /// Gate-index range [begin, end) of the parity readout block
  /// (collector preparation and the CNOT(s) onto the ancilla).
  std::pair<std::size_t, std::size_t> readout_range{0, 0};
  int readout_swaps = 0;
  int readout_cnots = 0;
};

/// Change of basis B with B P B† = Z on the support of P: H for X, S† then H
/// for Y, nothing for I/Z.
Circuit basis_change(const PauliString& p);

/// Prepare–readout–invert circuit for one Pauli term:
///   U, B, parity readout onto the ancilla, (readout inverse), B†, U†.
/// With a coupling map every two-qubit gate sits on an edge under the
/// returned layout; at most one SWAP is inserted into the readout block.
DspCircuit build_dsp_circuit(const Circuit& u, const PauliString& p,
                             const std::optional<CouplingMap>& coupling = std::nullopt);

/// True when every two-qubit gate acts on a coupled pair under `layout`.
bool respects_coupling(const Circuit& c, const std::vector<int>& layout,
                       const CouplingMap& coupling);

}  // namespace qemlab
