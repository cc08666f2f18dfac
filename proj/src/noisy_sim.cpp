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

#include "qemlab/noisy_sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace qemlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Rz is a virtual frame change on the hardware this models: no error, no time.
bool is_noisy_gate(const Gate& g) {
  return g.kind != GateKind::Barrier && g.kind != GateKind::Rz;
}

// Nearest integer k with angle ≈ k·step, if any.
std::optional<long> angle_multiple(double angle, double step) {
  const double k = std::round(angle / step);
  if (std::abs(angle - k * step) > 1e-9) return std::nullopt;
  return static_cast<long>(k);
}

// Applies a 1- or 2-qubit gate matrix to every column of m (m ← U m).
void apply_left(const Eigen::MatrixXcd& u, const Gate& g, int n, Eigen::MatrixXcd& m) {
  const std::int64_t dim = std::int64_t{1} << n;
  const std::int64_t cols = m.cols();
  if (g.arity() == 1) {
    const std::int64_t b = std::int64_t{1} << (n - 1 - g.qubits[0]);
    for (std::int64_t col = 0; col < cols; ++col) {
      Complex* v = m.col(col).data();
      for (std::int64_t j = 0; j < dim; ++j) {
        if (j & b) continue;
        const Complex a0 = v[j];
        const Complex a1 = v[j | b];
        v[j] = u(0, 0) * a0 + u(0, 1) * a1;
        v[j | b] = u(1, 0) * a0 + u(1, 1) * a1;
      }
    }
    return;
  }
  const std::int64_t b0 = std::int64_t{1} << (n - 1 - g.qubits[0]);
  const std::int64_t b1 = std::int64_t{1} << (n - 1 - g.qubits[1]);
  for (std::int64_t col = 0; col < cols; ++col) {
    Complex* v = m.col(col).data();
    for (std::int64_t j = 0; j < dim; ++j) {
      if (j & (b0 | b1)) continue;
      const std::int64_t idx[4] = {j, j | b1, j | b0, j | b0 | b1};
      const Complex a[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
      for (int r = 0; r < 4; ++r) {
        v[idx[r]] = u(r, 0) * a[0] + u(r, 1) * a[1] + u(r, 2) * a[2] + u(r, 3) * a[3];
      }
    }
  }
}

// Marginal over `measured` (ascending) of a full-register distribution.
std::vector<double> marginal(const std::vector<double>& full, int n,
                             const std::vector<int>& measured) {
  const int m = static_cast<int>(measured.size());
  std::vector<double> out(std::size_t{1} << m, 0.0);
  for (std::size_t j = 0; j < full.size(); ++j) {
    Bits key = 0;
    for (int k = 0; k < m; ++k) {
      key = (key << 1) | ((j >> (n - 1 - measured[k])) & 1U);
    }
    out[key] += full[j];
  }
  return out;
}

Circuit prepare_for_noise(const Circuit& c, const NoiseModel& noise) {
  if (c.count(GateKind::SWAP) > 0 && !noise.is_noiseless()) return decompose_swaps(c);
  return c;
}

Circuit with_rotation(const Circuit& c, const PauliString& basis) {
  if (basis.n_qubits() != c.n_qubits()) {
    throw std::invalid_argument("basis length does not match circuit");
  }
  Circuit full = c;
  full.append(measurement_rotation(basis, c.measured_qubits()));
  full.set_measured_qubits(c.measured_qubits());
  return full;
}

double gate_duration_ns(const Gate& g, const T1Damping& t1) {
  if (!is_noisy_gate(g)) return 0.0;
  return g.is_two_qubit() ? t1.gate_2q_ns : t1.gate_1q_ns;
}

}  // namespace

std::string bits_to_string(Bits b, int n_bits) {
  std::string s(static_cast<std::size_t>(n_bits), '0');
  for (int k = 0; k < n_bits; ++k) {
    if ((b >> (n_bits - 1 - k)) & 1U) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

Bits parse_bits(std::string_view text) {
  if (text.empty() || text.size() > 64) throw std::invalid_argument("bad bitstring length");
  Bits b = 0;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("bitstring must be 0/1");
    b = (b << 1) | static_cast<Bits>(ch == '1');
  }
  return b;
}

MeasurementSet::MeasurementSet(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 64) throw std::invalid_argument("bad register size");
}

void MeasurementSet::add(Bits outcome, std::uint64_t count) {
  if (n_ < 64 && (outcome >> n_) != 0) throw std::out_of_range("outcome exceeds register");
  if (count == 0) return;
  counts_[outcome] += count;
  shots_ += count;
}

std::uint64_t MeasurementSet::count(Bits outcome) const {
  auto it = counts_.find(outcome);
  return it == counts_.end() ? 0 : it->second;
}

double MeasurementSet::frequency(Bits outcome) const {
  if (shots_ == 0) throw std::domain_error("empty measurement set");
  return static_cast<double>(count(outcome)) / static_cast<double>(shots_);
}

void MeasurementSet::merge(const MeasurementSet& other) {
  if (other.n_ != n_) throw std::invalid_argument("register size mismatch");
  for (const auto& [b, c] : other.counts_) add(b, c);
}

double T1Damping::gamma(double duration_ns) const {
  if (duration_ns <= 0.0) return 0.0;
  return 1.0 - std::exp(-duration_ns / (t1_us * 1000.0));
}

double NoiseModel::flip(int qubit) const {
  if (readout_flip.empty()) return 0.0;
  if (readout_flip.size() == 1) return readout_flip[0];
  return readout_flip.at(static_cast<std::size_t>(qubit));
}

bool NoiseModel::has_gate_noise() const {
  return p_dep_1q > 0.0 || p_dep_2q > 0.0 || t1_damping.has_value();
}

bool NoiseModel::is_noiseless() const {
  return !has_gate_noise() &&
         std::all_of(readout_flip.begin(), readout_flip.end(), [](double p) { return p == 0.0; });
}

void NoiseModel::validate() const {
  check_probability(p_dep_1q, "p_dep_1q");
  check_probability(p_dep_2q, "p_dep_2q");
  for (double p : readout_flip) check_probability(p, "readout_flip");
  if (t1_damping) {
    const auto& t = *t1_damping;
    if (!(t.t1_us > 0.0)) throw std::invalid_argument("t1_us must be positive");
    if (t.gate_1q_ns < 0.0 || t.gate_2q_ns < 0.0 || t.readout_ns < 0.0) {
      throw std::invalid_argument("durations must be non-negative");
    }
  }
}

NoiseModel NoiseModel::ideal() {
  NoiseModel m;
  m.name = "ideal";
  return m;
}

NoiseModel NoiseModel::falcon_like() {
  NoiseModel m;
  m.name = "falcon-like";
  m.p_dep_1q = 2.2e-4;
  m.p_dep_2q = 7e-3;
  m.readout_flip = {1.4e-2};
  return m;
}

NoiseModel NoiseModel::by_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::replace(lower.begin(), lower.end(), '_', '-');
  if (lower == "ideal" || lower == "none" || lower == "noiseless") return ideal();
  if (lower == "falcon-like" || lower == "falcon") return falcon_like();
  throw std::invalid_argument("unknown noise preset: " + std::string(name));
}

DensityMatrix::DensityMatrix(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxDensityQubits) {
    throw std::invalid_argument("density matrix size guard");
  }
  dim_ = std::int64_t{1} << n_;
  rho_ = Eigen::MatrixXcd::Zero(dim_, dim_);
  rho_(0, 0) = 1.0;
}

void DensityMatrix::apply_unitary(const Gate& g) {
  if (g.kind == GateKind::Barrier) return;
  const Eigen::MatrixXcd u = gate_matrix(g);
  apply_left(u, g, n_, rho_);
  // (U ρ) U† = (U (U ρ)†)†
  Eigen::MatrixXcd t = rho_.adjoint();
  apply_left(u, g, n_, t);
  rho_ = t.adjoint();
}

void DensityMatrix::depolarize(std::span<const int> qubits, double p) {
  if (p == 0.0 || qubits.empty()) return;
  check_probability(p, "depolarizing probability");
  const int k = static_cast<int>(qubits.size());
  const double d = static_cast<double>(std::int64_t{1} << k);
  // Uniform non-identity Pauli with probability p equals replacing the
  // subsystem by I/d with probability lam.
  const double lam = p * d * d / (d * d - 1.0);
  std::vector<std::int64_t> patterns{0};
  std::int64_t mask = 0;
  for (int q : qubits) {
    const std::int64_t b = std::int64_t{1} << (n_ - 1 - q);
    mask |= b;
    const std::size_t size = patterns.size();
    for (std::size_t i = 0; i < size; ++i) patterns.push_back(patterns[i] | b);
  }
  for (std::int64_t j0 = 0; j0 < dim_; ++j0) {
    if (j0 & mask) continue;
    for (std::int64_t i0 = 0; i0 < dim_; ++i0) {
      if (i0 & mask) continue;
      Complex t = 0.0;
      for (auto s : patterns) t += rho_(i0 | s, j0 | s);
      t /= d;
      for (auto a : patterns) {
        for (auto b : patterns) {
          Complex& e = rho_(i0 | a, j0 | b);
          e = (1.0 - lam) * e + (a == b ? lam * t : Complex{0.0});
        }
      }
    }
  }
}

void DensityMatrix::amplitude_damp(int qubit, double gamma) {
  if (gamma == 0.0) return;
  check_probability(gamma, "damping gamma");
  const std::int64_t b = std::int64_t{1} << (n_ - 1 - qubit);
  const double s = std::sqrt(1.0 - gamma);
  for (std::int64_t j = 0; j < dim_; ++j) {
    if (j & b) continue;
    for (std::int64_t i = 0; i < dim_; ++i) {
      if (i & b) continue;
      rho_(i, j) += gamma * rho_(i | b, j | b);
      rho_(i | b, j | b) *= (1.0 - gamma);
      rho_(i | b, j) *= s;
      rho_(i, j | b) *= s;
    }
  }
}

double DensityMatrix::trace() const { return rho_.trace().real(); }

bool DensityMatrix::is_physical(double tol) const {
  if (std::abs(trace() - 1.0) > tol) return false;
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(dim_));
  for (std::int64_t i = 0; i < dim_; ++i) d[static_cast<std::size_t>(i)] = rho_(i, i).real();
  return d;
}

Circuit measurement_rotation(const PauliString& basis, const std::vector<int>& measured) {
  Circuit r(basis.n_qubits());
  for (int q : measured) {
    switch (basis.op(q)) {
      case 'X':
        r.h(q);
        break;
      case 'Y':
        r.sdg(q).h(q);
        break;
      default:
        break;
    }
  }
  return r;
}

DensityMatrix evolve_density(const Circuit& c, const NoiseModel& noise) {
  noise.validate();
  const Circuit run = prepare_for_noise(c, noise);
  DensityMatrix rho(run.n_qubits());
  for (const auto& g : run.gates()) {
    if (g.kind == GateKind::Barrier) continue;
    rho.apply_unitary(g);
    if (!is_noisy_gate(g)) continue;
    const std::span<const int> qs(g.qubits.data(), static_cast<std::size_t>(g.arity()));
    rho.depolarize(qs, g.is_two_qubit() ? noise.p_dep_2q : noise.p_dep_1q);
    if (noise.t1_damping) {
      const double gamma = noise.t1_damping->gamma(gate_duration_ns(g, *noise.t1_damping));
      for (int q : qs) rho.amplitude_damp(q, gamma);
    }
  }
  return rho;
}

std::vector<double> density_probabilities(const Circuit& c, const NoiseModel& noise,
                                          const PauliString& basis) {
  const Circuit full = with_rotation(c, basis);
  DensityMatrix rho = evolve_density(full, noise);
  if (noise.t1_damping && noise.t1_damping->readout_ns > 0.0) {
    const double gamma = noise.t1_damping->gamma(noise.t1_damping->readout_ns);
    for (int q : full.measured_qubits()) rho.amplitude_damp(q, gamma);
  }
  std::vector<double> probs = marginal(rho.diagonal(), full.n_qubits(), full.measured_qubits());
  for (double& p : probs) p = std::max(p, 0.0);
  return probs;
}

std::vector<double> apply_readout_flips(const std::vector<double>& probs, int n_bits,
                                        const std::vector<double>& flips) {
  if (probs.size() != (std::size_t{1} << n_bits)) {
    throw std::invalid_argument("distribution size mismatch");
  }
  if (flips.size() != static_cast<std::size_t>(n_bits)) {
    throw std::invalid_argument("one flip probability per bit required");
  }
  std::vector<double> out = probs;
  for (int k = 0; k < n_bits; ++k) {
    const double p = flips[static_cast<std::size_t>(k)];
    if (p == 0.0) continue;
    const std::size_t b = std::size_t{1} << (n_bits - 1 - k);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j & b) continue;
      const double a0 = out[j];
      const double a1 = out[j | b];
      out[j] = (1.0 - p) * a0 + p * a1;
      out[j | b] = p * a0 + (1.0 - p) * a1;
    }
  }
  return out;
}

MeasurementSet sample_distribution(const std::vector<double>& probs, int n_bits,
                                   std::uint64_t shots, std::mt19937_64& rng) {
  MeasurementSet m(n_bits);
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += std::max(p, 0.0);
  std::uint64_t remaining = shots;
  // Multinomial via sequential conditional binomials.
  for (std::size_t j = 0; j < probs.size() && remaining > 0; ++j) {
    const double p = std::max(probs[j], 0.0);
    if (p <= 0.0) continue;
    const double q = remaining_mass > 0.0 ? std::min(1.0, p / remaining_mass) : 1.0;
    std::uint64_t k = remaining;
    if (q < 1.0) {
      std::binomial_distribution<std::uint64_t> bin(remaining, q);
      k = bin(rng);
    }
    m.add(static_cast<Bits>(j), k);
    remaining -= k;
    remaining_mass -= p;
  }
  if (remaining > 0) {
    // Only reachable through rounding; put the rest on the last supported outcome.
    for (std::size_t j = probs.size(); j-- > 0;) {
      if (probs[j] > 0.0) {
        m.add(static_cast<Bits>(j), remaining);
        break;
      }
    }
  }
  return m;
}

MeasurementSet run_density(const Circuit& c, const NoiseModel& noise, const PauliString& basis,
                           std::uint64_t shots, std::uint64_t seed) {
  const int m = static_cast<int>(c.measured_qubits().size());
  std::vector<double> flips;
  for (int q : c.measured_qubits()) flips.push_back(noise.flip(q));
  const auto probs = apply_readout_flips(density_probabilities(c, noise, basis), m, flips);
  std::mt19937_64 rng(seed);
  return sample_distribution(probs, m, shots, rng);
}

bool is_clifford(const Circuit& c) {
  for (const auto& g : c.gates()) {
    switch (g.kind) {
      case GateKind::Rz:
      case GateKind::Ry:
        if (!angle_multiple(g.angle, kPi / 2)) return false;
        break;
      case GateKind::CPhase:
        if (!angle_multiple(g.angle, kPi)) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

namespace {

// Pauli frame over up to 64 qubits; bit q is qubit q.
struct Frame {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  bool xb(int q) const { return (x >> q) & 1U; }
  bool zb(int q) const { return (z >> q) & 1U; }
  void set(int q, bool xv, bool zv) {
    const std::uint64_t b = std::uint64_t{1} << q;
    x = (x & ~b) | (xv ? b : 0);
    z = (z & ~b) | (zv ? b : 0);
  }
};

void propagate(const Gate& g, Frame& f) {
  const int a = g.qubits[0];
  const int b = g.qubits[1];
  switch (g.kind) {
    case GateKind::H:
      f.set(a, f.zb(a), f.xb(a));
      break;
    case GateKind::S:
    case GateKind::Sdg:
      f.set(a, f.xb(a), f.zb(a) ^ f.xb(a));
      break;
    case GateKind::SqrtX:
    case GateKind::SqrtXdg:
      f.set(a, f.xb(a) ^ f.zb(a), f.zb(a));
      break;
    case GateKind::Rz:
      if (*angle_multiple(g.angle, kPi / 2) % 2 != 0) f.set(a, f.xb(a), f.zb(a) ^ f.xb(a));
      break;
    case GateKind::Ry:
      if (*angle_multiple(g.angle, kPi / 2) % 2 != 0) f.set(a, f.zb(a), f.xb(a));
      break;
    case GateKind::CNOT:
      f.set(b, f.xb(b) ^ f.xb(a), f.zb(b));
      f.set(a, f.xb(a), f.zb(a) ^ f.zb(b));
      break;
    case GateKind::CPhase:
      if (*angle_multiple(g.angle, kPi) % 2 != 0) {
        const bool xa = f.xb(a);
        const bool xbv = f.xb(b);
        f.set(a, xa, f.zb(a) ^ xbv);
        f.set(b, xbv, f.zb(b) ^ xa);
      }
      break;
    case GateKind::SWAP: {
      const bool xa = f.xb(a), za = f.zb(a);
      f.set(a, f.xb(b), f.zb(b));
      f.set(b, xa, za);
      break;
    }
    default:
      break;
  }
}

// Non-identity Pauli on the gate's qubits: code in [1, 4^k), two bits per
// qubit (x, z), qubits[0] in the high pair.
struct ErrorEvent {
  std::uint32_t gate;
  std::uint32_t code;
  friend bool operator==(const ErrorEvent&, const ErrorEvent&) = default;
};

struct PatternHash {
  std::size_t operator()(const std::vector<ErrorEvent>& v) const {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto& e : v) h = splitmix64(h ^ (std::uint64_t{e.gate} << 8 | e.code));
    return static_cast<std::size_t>(h);
  }
};

template <typename F>
void sample_errors(const Circuit& c, const NoiseModel& noise, std::mt19937_64& rng, F&& on_error) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> pick3(1, 3);
  std::uniform_int_distribution<std::uint32_t> pick15(1, 15);
  const auto& gates = c.gates();
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    if (!is_noisy_gate(g)) continue;
    const double p = g.is_two_qubit() ? noise.p_dep_2q : noise.p_dep_1q;
    if (p <= 0.0 || u01(rng) >= p) continue;
    on_error(static_cast<std::uint32_t>(i), g.is_two_qubit() ? pick15(rng) : pick3(rng));
  }
}

void apply_error_code(const Gate& g, std::uint32_t code, Frame& f) {
  if (g.is_two_qubit()) {
    const int a = g.qubits[0], b = g.qubits[1];
    f.set(a, f.xb(a) ^ ((code >> 3) & 1U), f.zb(a) ^ ((code >> 2) & 1U));
    f.set(b, f.xb(b) ^ ((code >> 1) & 1U), f.zb(b) ^ (code & 1U));
  } else {
    const int a = g.qubits[0];
    f.set(a, f.xb(a) ^ ((code >> 1) & 1U), f.zb(a) ^ (code & 1U));
  }
}

PauliString error_string(const Gate& g, std::uint32_t code, int n) {
  Frame f;
  apply_error_code(g, code, f);
  PauliString p(n);
  for (int q = 0; q < n; ++q) {
    const bool x = f.xb(q), z = f.zb(q);
    if (x || z) p.set_op(q, x ? (z ? 'Y' : 'X') : 'Z');
  }
  return p;
}

// Marginal Born distribution of a pure state over `measured`.
std::vector<double> born_marginal(const StateVector& psi, int n, const std::vector<int>& measured) {
  std::vector<double> full(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index j = 0; j < psi.size(); ++j) full[static_cast<std::size_t>(j)] = std::norm(psi(j));
  return marginal(full, n, measured);
}

Bits flip_readout(Bits b, const std::vector<double>& flips, std::mt19937_64& rng) {
  const int m = static_cast<int>(flips.size());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int k = 0; k < m; ++k) {
    if (flips[static_cast<std::size_t>(k)] > 0.0 && u01(rng) < flips[static_cast<std::size_t>(k)]) {
      b ^= Bits{1} << (m - 1 - k);
    }
  }
  return b;
}

}  // namespace

MeasurementSet run_trajectories(const Circuit& c, const NoiseModel& noise, std::uint64_t shots,
                                std::uint64_t seed, const std::optional<PauliString>& basis) {
  noise.validate();
  if (noise.t1_damping) {
    throw std::invalid_argument("amplitude damping is not supported by the trajectory engine");
  }
  if (c.n_qubits() > 26) throw std::invalid_argument("trajectory size guard");
  const Circuit full =
      prepare_for_noise(with_rotation(c, basis.value_or(PauliString(c.n_qubits()))), noise);
  const auto& measured = full.measured_qubits();
  const int n = full.n_qubits();
  const int m = static_cast<int>(measured.size());
  std::vector<double> flips;
  for (int q : measured) flips.push_back(noise.flip(q));

  std::mt19937_64 rng(seed);
  MeasurementSet out(m);

  if (is_clifford(full)) {
    const auto probs = born_marginal(simulate_statevector(full), n, measured);
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    std::uniform_real_distribution<double> u01(0.0, cdf.back());
    std::unordered_map<Bits, std::uint64_t> tally;
    for (std::uint64_t s = 0; s < shots; ++s) {
      Frame f;
      const auto& gates = full.gates();
      std::size_t next = 0;
      sample_errors(full, noise, rng, [&](std::uint32_t gi, std::uint32_t code) {
        for (; next <= gi; ++next) propagate(gates[next], f);
        apply_error_code(gates[gi], code, f);
      });
      for (; next < gates.size(); ++next) propagate(gates[next], f);
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u01(rng));
      Bits b = static_cast<Bits>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                          static_cast<std::ptrdiff_t>(cdf.size()) - 1));
      for (int k = 0; k < m; ++k) {
        if (f.xb(measured[static_cast<std::size_t>(k)])) b ^= Bits{1} << (m - 1 - k);
      }
      ++tally[flip_readout(b, flips, rng)];
    }
    std::map<Bits, std::uint64_t> ordered(tally.begin(), tally.end());
    for (const auto& [b, k] : ordered) out.add(b, k);
    return out;
  }

  // Group shots by error pattern; simulate each distinct pattern once.
  std::unordered_map<std::vector<ErrorEvent>, std::uint64_t, PatternHash> patterns;
  std::vector<std::vector<ErrorEvent>> order;
  for (std::uint64_t s = 0; s < shots; ++s) {
    std::vector<ErrorEvent> events;
    sample_errors(full, noise, rng, [&](std::uint32_t gi, std::uint32_t code) {
      events.push_back({gi, code});
    });
    auto [it, inserted] = patterns.try_emplace(events, 0);
    if (inserted) order.push_back(events);
    ++it->second;
  }
  for (const auto& events : order) {
    StateVector psi = StateVector::Zero(std::int64_t{1} << n);
    psi(0) = 1.0;
    std::size_t e = 0;
    const auto& gates = full.gates();
    for (std::size_t i = 0; i < gates.size(); ++i) {
      apply_gate(gates[i], n, psi);
      if (e < events.size() && events[e].gate == i) {
        psi = qemlab::apply(error_string(gates[i], events[e].code, n), psi);
        ++e;
      }
    }
    const auto probs = born_marginal(psi, n, measured);
    MeasurementSet part = sample_distribution(probs, m, patterns[events], rng);
    for (const auto& [b, k] : part.counts()) {
      for (std::uint64_t r = 0; r < k; ++r) out.add(flip_readout(b, flips, rng));
    }
  }
  return out;
}

double ghz_fidelity(double p_zeros, double p_ones) {
  check_probability(p_zeros, "p_zeros");
  check_probability(p_ones, "p_ones");
  const double s = std::sqrt(p_zeros) + std::sqrt(p_ones);
  return 0.5 * s * s;
}

double ghz_fidelity(const MeasurementSet& m) {
  if (m.empty()) throw std::invalid_argument("empty measurement set");
  const int n = m.n_qubits();
  const Bits ones = n == 64 ? ~Bits{0} : (Bits{1} << n) - 1;
  return ghz_fidelity(m.frequency(0), m.frequency(ones));
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(root ^ splitmix64(h));
}

double total_variation(const MeasurementSet& a, const MeasurementSet& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("register size mismatch");
  if (a.empty() || b.empty()) throw std::invalid_argument("empty measurement set");
  std::map<Bits, double> diff;
  for (const auto& [k, c] : a.counts()) diff[k] += static_cast<double>(c) / a.shots();
  for (const auto& [k, c] : b.counts()) diff[k] -= static_cast<double>(c) / b.shots();
  double tv = 0.0;
  for (const auto& [k, d] : diff) tv += std::abs(d);
  return 0.5 * tv;
}

}  // namespace qemlab
