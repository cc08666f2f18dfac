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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qemlab/circuit.hpp"
#include "qemlab/io.hpp"

using namespace qemlab;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd cnot_matrix() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Circuit random_circuit(int n, int depth, std::mt19937_64& rng) {
  Circuit c(n);
  std::uniform_int_distribution<int> kind(0, 8);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < depth; ++i) {
    const int a = qubit(rng);
    int b = qubit(rng);
    while (b == a) b = qubit(rng);
    switch (kind(rng)) {
      case 0: c.h(a); break;
      case 1: c.s(a); break;
      case 2: c.sx(a); break;
      case 3: c.rz(a, angle(rng)); break;
      case 4: c.ry(a, angle(rng)); break;
      case 5: c.cphase(a, b, angle(rng)); break;
      case 6: c.swap(a, b); break;
      default: c.cnot(a, b); break;
    }
  }
  return c;
}

}  // namespace

TEST(Gate, Validation) {
  EXPECT_THROW(Circuit(2).cnot(0, 0), std::invalid_argument);
  EXPECT_THROW(Circuit(2).h(2), std::invalid_argument);
  EXPECT_EQ(parse_gate_kind("cnot"), GateKind::CNOT);
  EXPECT_THROW(parse_gate_kind("toffoli"), std::invalid_argument);
}

TEST(Gate, NativeRotationIsRyUpToZ) {
  // SqrtX Rz(t) SqrtX equals Ry(pi - t) Z up to a global phase.
  for (double t : {-1.3, 0.0, 0.4, 2.9}) {
    Circuit native(1);
    native.sx(0).rz(0, t).sx(0);
    Circuit ry(1);
    ry.add(Gate::one(GateKind::Rz, 0, kPi)).ry(0, kPi - t);
    EXPECT_LT(distance_up_to_phase(circuit_unitary(native), circuit_unitary(ry)), 1e-12);
  }
}

TEST(Ansatz, ZeroAnglesRyFormIsIdentity) {
  const std::array<double, 6> zeros{};
  const auto c = build_ansatz(zeros, AnsatzForm::RyGates);
  EXPECT_EQ(c.count(GateKind::Ry), 6u);
  EXPECT_EQ(c.count(GateKind::CNOT), 2u);
  const auto psi = simulate_statevector(c);
  EXPECT_NEAR(std::abs(psi(0)), 1.0, 1e-12);
}

TEST(Ansatz, ReferenceParametersReachChemicalPrecision) {
  const auto h = load_hcl_hamiltonian();
  const double e0 = ground_state(h).energy;
  const auto psi = simulate_statevector(build_ansatz(kReferenceAnsatzParams));
  const double e = expectation(h, psi);
  EXPECT_GE(e, e0 - 1e-9);
  EXPECT_LT(e - e0, 1.6e-3);
}

TEST(Ansatz, WrongParameterCount) {
  const std::vector<double> five(5, 0.0);
  EXPECT_THROW(build_ansatz(five), std::invalid_argument);
}

TEST(Ghz, Structure) {
  EXPECT_EQ(build_ghz(1).gates().size(), 1u);
  const auto g3 = build_ghz(3);
  EXPECT_EQ(g3.gates().size(), 3u);
  const auto psi = simulate_statevector(g3);
  EXPECT_NEAR(std::norm(psi(0)), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(psi(7)), 0.5, 1e-12);
  EXPECT_EQ(build_ghz(21).count(GateKind::CNOT), 20u);
  EXPECT_THROW(build_ghz(0), std::invalid_argument);
}

TEST(Amplify, SingleCnot) {
  Circuit c(2);
  c.cnot(0, 1);
  const auto a = amplify_noise(c, 1);
  EXPECT_EQ(a.count(GateKind::CNOT), 2u);
  EXPECT_EQ(a.count(GateKind::Rz), 3u);
  EXPECT_EQ(a.count(GateKind::H), 2u);
  EXPECT_LT(distance_up_to_phase(circuit_unitary(a), cnot_matrix()), 1e-10);
  EXPECT_THROW(amplify_noise(c, 0), std::invalid_argument);
}

TEST(Amplify, AnsatzCounts) {
  const auto c = build_ansatz(kReferenceAnsatzParams, AnsatzForm::RyGates);
  const auto a = amplify_noise(c, 3);
  EXPECT_EQ(a.count(GateKind::CNOT), 12u);
  EXPECT_EQ(a.count(GateKind::Rz), 18u);
  EXPECT_EQ(a.count(GateKind::H), 4u);
  EXPECT_EQ(a.count(GateKind::Ry), 6u);
}

TEST(Amplify, NoCnotUnchanged) {
  Circuit c(2);
  c.h(0).rz(1, 0.3);
  EXPECT_EQ(amplify_noise(c, 1).gates(), c.gates());
}

TEST(Amplify, PreservesUnitaryOnRandomCircuits) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const auto c = random_circuit(n, 12, rng);
    const auto u = circuit_unitary(c);
    for (int lambda = 1; lambda <= 4; ++lambda) {
      ASSERT_LT(distance_up_to_phase(u, circuit_unitary(amplify_noise(c, lambda))), 1e-9);
    }
  }
}

TEST(Circuit, InverseReturnsToZero) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_circuit(4, 20, rng);
    c.append(invert(c));
    const auto psi = simulate_statevector(c);
    ASSERT_NEAR(std::abs(psi(0)), 1.0, 1e-12);
  }
}

TEST(Circuit, SwapDecomposition) {
  Circuit c(3);
  c.swap(0, 2);
  const auto d = decompose_swaps(c);
  EXPECT_EQ(d.count(GateKind::CNOT), 3u);
  EXPECT_LT(distance_up_to_phase(circuit_unitary(c), circuit_unitary(d)), 1e-12);
}

TEST(Coupling, Validation) {
  EXPECT_THROW(CouplingMap(3, {{1, 1}}), std::invalid_argument);
  const auto cm = CouplingMap::dsp_cluster();
  EXPECT_TRUE(cm.connected(1, 4));
  EXPECT_TRUE(cm.connected(4, 1));
  EXPECT_FALSE(cm.connected(0, 2));
}

TEST(Dsp, AllToAllSingleZ) {
  const auto u = build_ansatz(kReferenceAnsatzParams);
  const auto d = build_dsp_circuit(u, PauliString::parse("IIZ"));
  EXPECT_EQ(d.circuit.n_qubits(), 4);
  EXPECT_EQ(d.ancilla, 3);
  EXPECT_EQ(d.readout_cnots, 1);
  EXPECT_EQ(d.readout_swaps, 0);
  EXPECT_EQ(d.circuit.count(GateKind::SWAP), 0u);
}

TEST(Dsp, ClusterZZINeedsOneReadoutSwap) {
  const auto u = build_ansatz(kReferenceAnsatzParams);
  const auto d = build_dsp_circuit(u, PauliString::parse("ZZI"), CouplingMap::dsp_cluster());
  EXPECT_EQ(d.readout_swaps, 1);
  std::size_t swaps_in_block = 0;
  for (std::size_t i = d.readout_range.first; i < d.readout_range.second; ++i) {
    swaps_in_block += d.circuit.gates()[i].kind == GateKind::SWAP;
  }
  EXPECT_EQ(swaps_in_block, 1u);
  EXPECT_TRUE(respects_coupling(d.circuit, d.layout, CouplingMap::dsp_cluster()));
}

TEST(Dsp, ClusterHostsEveryHamiltonianTerm) {
  const auto h = load_hcl_hamiltonian();
  const auto u = build_ansatz(kReferenceAnsatzParams);
  for (const auto& t : h.non_identity_terms()) {
    const auto d = build_dsp_circuit(u, t.string, CouplingMap::dsp_cluster());
    EXPECT_LE(d.readout_swaps, 1) << t.string.str();
    EXPECT_TRUE(respects_coupling(d.circuit, d.layout, CouplingMap::dsp_cluster()));
  }
}

TEST(Dsp, XYZBasisAndReadout) {
  const auto u = build_ansatz(kReferenceAnsatzParams);
  const auto d = build_dsp_circuit(u, PauliString::parse("XYZ"));
  EXPECT_EQ(d.readout_cnots, 3);
  const auto b = basis_change(PauliString::parse("XYZ"));
  ASSERT_EQ(b.gates().size(), 3u);
  EXPECT_EQ(b.gates()[0].kind, GateKind::H);
  EXPECT_EQ(b.gates()[1].kind, GateKind::Sdg);
  EXPECT_EQ(b.gates()[2].kind, GateKind::H);
}

TEST(Dsp, BasisChangeMapsPauliToZ) {
  for (const char* s : {"XYZ", "YYI", "XIX", "IYY"}) {
    const auto p = PauliString::parse(s);
    const auto b = circuit_unitary(basis_change(p));
    PauliString z(p.n_qubits());
    for (int q : p.support()) z.set_op(q, 'Z');
    const Eigen::MatrixXcd lhs = b * to_dense(p).matrix() * b.adjoint();
    EXPECT_LT((lhs - to_dense(z).matrix()).cwiseAbs().maxCoeff(), 1e-12) << s;
  }
}

TEST(Dsp, RejectsIdentityAndSmallCoupling) {
  const auto u = build_ansatz(kReferenceAnsatzParams);
  EXPECT_THROW(build_dsp_circuit(u, PauliString::parse("III")), std::invalid_argument);
  EXPECT_THROW(build_dsp_circuit(u, PauliString::parse("ZII"), CouplingMap::line(3)),
               std::invalid_argument);
}

TEST(Dsp, LineCouplingCannotHostEverything) {
  const auto u = build_ansatz(kReferenceAnsatzParams);
  EXPECT_THROW(build_dsp_circuit(u, PauliString::parse("ZZZ"), CouplingMap::line(4)),
               std::runtime_error);
}

TEST(Io, CircuitRoundTrip) {
  const auto c = build_ansatz(kReferenceAnsatzParams);
  const auto back = circuit_from_json(to_json(c));
  EXPECT_EQ(back.gates(), c.gates());
}
