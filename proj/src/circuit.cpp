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

#include "qemlab/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace qemlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct KindInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  bool angle;
};

constexpr std::array<KindInfo, 12> kKinds{{
    {GateKind::H, "H", 1, false},
    {GateKind::S, "S", 1, false},
    {GateKind::Sdg, "Sdg", 1, false},
    {GateKind::X, "X", 1, false},
    {GateKind::SqrtX, "SqrtX", 1, false},
    {GateKind::SqrtXdg, "SqrtXdg", 1, false},
    {GateKind::Rz, "Rz", 1, true},
    {GateKind::Ry, "Ry", 1, true},
    {GateKind::CNOT, "CNOT", 2, false},
    {GateKind::CPhase, "CPhase", 2, true},
    {GateKind::SWAP, "SWAP", 2, false},
    {GateKind::Barrier, "Barrier", 0, false},
}};

const KindInfo& info(GateKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k;
  }
  throw std::logic_error("unknown gate kind");
}

void check_qubit(int q, int n) {
  if (q < 0 || q >= n) {
    throw std::invalid_argument("qubit index " + std::to_string(q) +
                                " outside register of " + std::to_string(n));
  }
}

}  // namespace

std::string_view gate_name(GateKind kind) { return info(kind).name; }

GateKind parse_gate_kind(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name.size() != name.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(k.name[i])) !=
          std::tolower(static_cast<unsigned char>(name[i]))) {
        same = false;
        break;
      }
    }
    if (same) return k.kind;
  }
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

int gate_arity(GateKind kind) { return info(kind).arity; }
bool gate_has_angle(GateKind kind) { return info(kind).angle; }

Gate Gate::one(GateKind kind, int q, double angle) {
  if (gate_arity(kind) != 1) {
    throw std::invalid_argument(std::string(gate_name(kind)) +
                                " is not a single-qubit gate");
  }
  return Gate{kind, {q, -1}, angle};
}

Gate Gate::two(GateKind kind, int a, int b, double angle) {
  if (gate_arity(kind) != 2) {
    throw std::invalid_argument(std::string(gate_name(kind)) +
                                " is not a two-qubit gate");
  }
  if (a == b) {
    throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
  return Gate{kind, {a, b}, angle};
}

Gate Gate::barrier() { return Gate{GateKind::Barrier, {-1, -1}, 0.0}; }

Eigen::MatrixXcd gate_matrix(const Gate& g) {
  using M = Eigen::MatrixXcd;
  const Complex i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  M m;
  switch (g.kind) {
    case GateKind::H:
      m.resize(2, 2);
      m << r, r, r, -r;
      return m;
    case GateKind::S:
      m.resize(2, 2);
      m << 1, 0, 0, i;
      return m;
    case GateKind::Sdg:
      m.resize(2, 2);
      m << 1, 0, 0, -i;
      return m;
    case GateKind::X:
      m.resize(2, 2);
      m << 0, 1, 1, 0;
      return m;
    case GateKind::SqrtX:
      m.resize(2, 2);
      m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5),
          Complex(0.5, 0.5);
      return m;
    case GateKind::SqrtXdg:
      m.resize(2, 2);
      m << Complex(0.5, -0.5), Complex(0.5, 0.5), Complex(0.5, 0.5),
          Complex(0.5, -0.5);
      return m;
    case GateKind::Rz:
      m.resize(2, 2);
      m << std::exp(-i * g.angle / 2.0), 0, 0, std::exp(i * g.angle / 2.0);
      return m;
    case GateKind::Ry: {
      const double c = std::cos(g.angle / 2.0);
      const double s = std::sin(g.angle / 2.0);
      m.resize(2, 2);
      m << c, -s, s, c;
      return m;
    }
    case GateKind::CNOT:
      m = M::Zero(4, 4);
      m(0, 0) = m(1, 1) = 1;
      m(2, 3) = m(3, 2) = 1;
      return m;
    case GateKind::CPhase:
      m = M::Identity(4, 4);
      m(3, 3) = std::exp(i * g.angle);
      return m;
    case GateKind::SWAP:
      m = M::Zero(4, 4);
      m(0, 0) = m(3, 3) = 1;
      m(1, 2) = m(2, 1) = 1;
      return m;
    case GateKind::Barrier:
      break;
  }
  throw std::invalid_argument("barrier has no matrix");
}

Circuit::Circuit(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 64) {
    throw std::invalid_argument("circuit needs 1..64 qubits");
  }
  measured_.resize(n_qubits);
  for (int q = 0; q < n_qubits; ++q) measured_[q] = q;
}

Circuit& Circuit::add(const Gate& g) {
  const int arity = g.arity();
  for (int k = 0; k < arity; ++k) check_qubit(g.qubits[k], n_);
  if (arity == 2 && g.qubits[0] == g.qubits[1]) {
    throw std::invalid_argument("two-qubit gate on a repeated qubit");
  }
  gates_.push_back(g);
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits() > n_) {
    throw std::invalid_argument("appended circuit is wider than target");
  }
  for (const auto& g : other.gates()) add(g);
  return *this;
}

void Circuit::set_measured_qubits(std::vector<int> qubits) {
  std::sort(qubits.begin(), qubits.end());
  qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
  for (int q : qubits) check_qubit(q, n_);
  measured_ = std::move(qubits);
}

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      gates_.begin(), gates_.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

std::size_t Circuit::two_qubit_count() const {
  return static_cast<std::size_t>(std::count_if(
      gates_.begin(), gates_.end(), [](const Gate& g) { return g.is_two_qubit(); }));
}

void apply_gate(const Gate& g, int n_qubits, StateVector& psi) {
  if (g.kind == GateKind::Barrier) return;
  const Eigen::MatrixXcd u = gate_matrix(g);
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  if (g.arity() == 1) {
    const std::int64_t m = std::int64_t{1} << (n_qubits - 1 - g.qubits[0]);
    for (std::int64_t j = 0; j < dim; ++j) {
      if (j & m) continue;
      const Complex a0 = psi(j);
      const Complex a1 = psi(j | m);
      psi(j) = u(0, 0) * a0 + u(0, 1) * a1;
      psi(j | m) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return;
  }
  const std::int64_t m0 = std::int64_t{1} << (n_qubits - 1 - g.qubits[0]);
  const std::int64_t m1 = std::int64_t{1} << (n_qubits - 1 - g.qubits[1]);
  for (std::int64_t j = 0; j < dim; ++j) {
    if (j & (m0 | m1)) continue;
    const std::array<std::int64_t, 4> idx{j, j | m1, j | m0, j | m0 | m1};
    std::array<Complex, 4> a{psi(idx[0]), psi(idx[1]), psi(idx[2]), psi(idx[3])};
    for (int r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (int c = 0; c < 4; ++c) acc += u(r, c) * a[c];
      psi(idx[r]) = acc;
    }
  }
}

StateVector simulate_statevector(const Circuit& c) {
  if (c.n_qubits() > 30) throw std::invalid_argument("statevector too large");
  StateVector psi = StateVector::Zero(std::int64_t{1} << c.n_qubits());
  psi(0) = 1.0;
  for (const auto& g : c.gates()) apply_gate(g, c.n_qubits(), psi);
  return psi;
}

Eigen::MatrixXcd circuit_unitary(const Circuit& c) {
  if (c.n_qubits() > 10) throw std::invalid_argument("unitary too large");
  const std::int64_t dim = std::int64_t{1} << c.n_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    StateVector v = u.col(col);
    for (const auto& g : c.gates()) apply_gate(g, c.n_qubits(), v);
    u.col(col) = v;
  }
  return u;
}

double distance_up_to_phase(const Eigen::MatrixXcd& a,
                            const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  // Optimal phase aligns the Frobenius inner product <b, a>.
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase =
      std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

Circuit invert(const Circuit& c) {
  Circuit out(c.n_qubits());
  out.set_measured_qubits(c.measured_qubits());
  for (auto it = c.gates().rbegin(); it != c.gates().rend(); ++it) {
    Gate g = *it;
    switch (g.kind) {
      case GateKind::S: g.kind = GateKind::Sdg; break;
      case GateKind::Sdg: g.kind = GateKind::S; break;
      case GateKind::SqrtX: g.kind = GateKind::SqrtXdg; break;
      case GateKind::SqrtXdg: g.kind = GateKind::SqrtX; break;
      case GateKind::Rz:
      case GateKind::Ry:
      case GateKind::CPhase: g.angle = -g.angle; break;
      default: break;
    }
    out.add(g);
  }
  return out;
}

Circuit decompose_swaps(const Circuit& c) {
  Circuit out(c.n_qubits());
  out.set_measured_qubits(c.measured_qubits());
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::SWAP) {
      const int a = g.qubits[0];
      const int b = g.qubits[1];
      out.cnot(a, b).cnot(b, a).cnot(a, b);
    } else {
      out.add(g);
    }
  }
  return out;
}

Circuit build_ansatz(std::span<const double> params, AnsatzForm form) {
  if (params.size() != 6) {
    throw std::invalid_argument("ansatz takes 6 parameters, got " +
                                std::to_string(params.size()));
  }
  Circuit c(3);
  auto rotation = [&](int q, double theta) {
    if (form == AnsatzForm::RyGates) {
      c.ry(q, theta);
    } else {
      c.sx(q).rz(q, theta).sx(q);
    }
  };
  const std::array<int, 3> layer{kAnsatzQubitC, kAnsatzQubitB, kAnsatzQubitA};
  for (int k = 0; k < 3; ++k) rotation(layer[k], params[k]);
  c.cnot(kAnsatzQubitB, kAnsatzQubitC);
  c.cnot(kAnsatzQubitC, kAnsatzQubitA);
  for (int k = 0; k < 3; ++k) rotation(layer[k], params[3 + k]);
  return c;
}

Circuit build_ghz(int n) {
  if (n < 1) throw std::invalid_argument("GHZ needs at least one qubit");
  Circuit c(n);
  c.h(0);
  for (int q = 0; q + 1 < n; ++q) c.cnot(q, q + 1);
  return c;
}

Circuit amplify_noise(const Circuit& c, int lambda) {
  if (lambda < 1) {
    throw std::invalid_argument("noise amplification factor must be >= 1");
  }
  Circuit out(c.n_qubits());
  out.set_measured_qubits(c.measured_qubits());
  const double theta = kPi / lambda;
  for (const auto& g : c.gates()) {
    if (g.kind != GateKind::CNOT) {
      out.add(g);
      continue;
    }
    const int ctrl = g.qubits[0];
    const int tgt = g.qubits[1];
    out.h(tgt);
    for (int k = 0; k < lambda; ++k) {
      out.rz(ctrl, theta / 2.0);
      out.cnot(ctrl, tgt);
      out.rz(tgt, -theta / 2.0);
      out.cnot(ctrl, tgt);
      out.rz(tgt, theta / 2.0);
    }
    out.h(tgt);
  }
  return out;
}

CouplingMap::CouplingMap(int n_physical, std::vector<std::pair<int, int>> edges)
    : n_(n_physical) {
  for (auto [a, b] : edges) {
    check_qubit(a, n_physical);
    check_qubit(b, n_physical);
    if (a == b) throw std::invalid_argument("coupling map has a self-loop");
    edges_.insert({std::min(a, b), std::max(a, b)});
  }
}

bool CouplingMap::connected(int a, int b) const {
  return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

CouplingMap CouplingMap::dsp_cluster() {
  return CouplingMap(5, {{0, 1}, {1, 2}, {2, 3}, {1, 4}});
}

CouplingMap CouplingMap::line(int n) {
  std::vector<std::pair<int, int>> e;
  for (int q = 0; q + 1 < n; ++q) e.emplace_back(q, q + 1);
  return CouplingMap(n, std::move(e));
}

bool respects_coupling(const Circuit& c, const std::vector<int>& layout,
                       const CouplingMap& coupling) {
  for (const auto& g : c.gates()) {
    if (!g.is_two_qubit()) continue;
    if (!coupling.connected(layout.at(g.qubits[0]), layout.at(g.qubits[1]))) {
      return false;
    }
  }
  return true;
}

Circuit basis_change(const PauliString& p) {
  Circuit b(p.n_qubits());
  for (int q = 0; q < p.n_qubits(); ++q) {
    switch (p.op(q)) {
      case 'X': b.h(q); break;
      case 'Y': b.sdg(q).h(q); break;
      default: break;
    }
  }
  return b;
}

namespace {

// Parity readout of `support` onto `ancilla`. `prep` (W) moves the parity onto
// `collector`; the caller applies W, CNOT(collector→ancilla), W†.
struct ReadoutPlan {
  std::vector<Gate> prep;
  std::vector<int> parity_sources;
  int swaps = 0;
  int two_qubit_total = 0;  // W + parity CNOTs + W†
};

std::optional<ReadoutPlan> best_plan_for_layout(const std::vector<int>& support,
                                                int n_system, int ancilla,
                                                const std::vector<int>& layout,
                                                const CouplingMap& cm) {
  auto adj = [&](int a, int b) { return cm.connected(layout[a], layout[b]); };
  std::optional<ReadoutPlan> best;
  auto consider = [&](ReadoutPlan plan) {
    plan.two_qubit_total = 2 * static_cast<int>(plan.prep.size()) +
                           static_cast<int>(plan.parity_sources.size());
    if (!best || std::tie(plan.swaps, plan.two_qubit_total) <
                     std::tie(best->swaps, best->two_qubit_total)) {
      best = std::move(plan);
    }
  };

  if (std::all_of(support.begin(), support.end(),
                  [&](int q) { return adj(q, ancilla); })) {
    consider(ReadoutPlan{{}, support, 0, 0});
  }
  for (int s : support) {
    if (!adj(s, ancilla)) continue;
    ReadoutPlan plan;
    bool ok = true;
    for (int t : support) {
      if (t == s) continue;
      if (!adj(t, s)) {
        ok = false;
        break;
      }
      plan.prep.push_back(Gate::two(GateKind::CNOT, t, s));
    }
    if (!ok) continue;
    plan.parity_sources = {s};
    consider(std::move(plan));
  }
  for (int s = 0; s < n_system; ++s) {
    if (!adj(s, ancilla)) continue;
    if (std::find(support.begin(), support.end(), s) != support.end()) continue;
    for (int t0 : support) {
      if (!adj(t0, s)) continue;
      ReadoutPlan plan;
      plan.swaps = 1;
      plan.prep.push_back(Gate::two(GateKind::SWAP, t0, s));
      bool ok = true;
      for (int t : support) {
        if (t == t0) continue;
        if (!adj(t, s)) {
          ok = false;
          break;
        }
        plan.prep.push_back(Gate::two(GateKind::CNOT, t, s));
      }
      if (!ok) continue;
      plan.parity_sources = {s};
      consider(std::move(plan));
    }
  }
  return best;
}

void enumerate_layouts(int n_logical, const CouplingMap& cm,
                       std::vector<int>& current, std::vector<bool>& used,
                       const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(current.size()) == n_logical) {
    visit(current);
    return;
  }
  for (int p = 0; p < cm.n_physical(); ++p) {
    if (used[p]) continue;
    used[p] = true;
    current.push_back(p);
    enumerate_layouts(n_logical, cm, current, used, visit);
    current.pop_back();
    used[p] = false;
  }
}

}  // namespace

DspCircuit build_dsp_circuit(const Circuit& u, const PauliString& p,
                             const std::optional<CouplingMap>& coupling) {
  const int n = u.n_qubits();
  if (p.n_qubits() != n) {
    throw std::invalid_argument("Pauli term width does not match circuit");
  }
  if (p.is_identity()) {
    throw std::invalid_argument("DSP needs a non-identity Pauli term");
  }
  const std::vector<int> support = p.support();
  const int ancilla = n;

  ReadoutPlan plan;
  std::vector<int> layout;
  if (!coupling) {
    plan.parity_sources = support;
  } else {
    if (coupling->n_physical() < n + 1) {
      throw std::invalid_argument("coupling map has fewer qubits than the DSP register");
    }
    Circuit system_part(n + 1);
    system_part.append(u);
    std::optional<ReadoutPlan> best;
    std::vector<int> current;
    std::vector<bool> used(coupling->n_physical(), false);
    enumerate_layouts(n + 1, *coupling, current, used, [&](const std::vector<int>& l) {
      if (!respects_coupling(system_part, l, *coupling)) return;
      auto candidate = best_plan_for_layout(support, n, ancilla, l, *coupling);
      if (!candidate) return;
      if (!best || std::tie(candidate->swaps, candidate->two_qubit_total) <
                       std::tie(best->swaps, best->two_qubit_total)) {
        best = std::move(candidate);
        layout = l;
      }
    });
    if (!best) {
      throw std::runtime_error("coupling map cannot host the parity readout of " +
                               p.str() + " with at most one SWAP");
    }
    plan = std::move(*best);
  }

  DspCircuit out;
  out.ancilla = ancilla;
  out.layout = layout;
  Circuit c(n + 1);
  const Circuit basis = basis_change(p);
  c.append(u);
  c.append(basis);
  c.barrier();
  out.readout_range.first = c.gates().size();
  for (const auto& g : plan.prep) c.add(g);
  for (int q : plan.parity_sources) c.cnot(q, ancilla);
  out.readout_range.second = c.gates().size();
  for (auto it = plan.prep.rbegin(); it != plan.prep.rend(); ++it) c.add(*it);
  c.barrier();
  c.append(invert(basis));
  c.append(invert(u));
  out.readout_swaps = plan.swaps;
  out.readout_cnots = static_cast<int>(std::count_if(
      plan.prep.begin(), plan.prep.end(),
      [](const Gate& g) { return g.kind == GateKind::CNOT; })) +
                      static_cast<int>(plan.parity_sources.size());
  out.circuit = std::move(c);
  return out;
}

}  // namespace qemlab
