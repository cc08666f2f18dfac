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

#include "qemlab/pauli.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qemlab {

namespace {

void require_qubits(int n) {
  if (n < 0 || n > 64) {
    throw std::invalid_argument("Pauli strings support 0..64 qubits, got " +
                                std::to_string(n));
  }
}

void require_same_length(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw std::invalid_argument("Pauli string length mismatch: " + a.str() +
                                " vs " + b.str());
  }
}

void require_dense(int n) {
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument("dense operator requested for " +
                                std::to_string(n) + " qubits (limit " +
                                std::to_string(kMaxDenseQubits) + ")");
  }
}

// i^k for the Y factors: Y = i·X·Z in the X^x Z^z representation.
int y_count(const PauliString& p) {
  return std::popcount(p.x_bits() & p.z_bits());
}

Complex i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

PauliString::PauliString(int n_qubits) : n_(n_qubits) {
  require_qubits(n_qubits);
}

PauliString::PauliString(int n_qubits, std::uint64_t x_bits,
                         std::uint64_t z_bits)
    : n_(n_qubits), x_(x_bits), z_(z_bits) {
  require_qubits(n_qubits);
  const std::uint64_t valid =
      n_qubits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_qubits) - 1;
  if ((x_bits | z_bits) & ~valid) {
    throw std::invalid_argument("Pauli bits outside register");
  }
}

PauliString PauliString::parse(std::string_view text) {
  PauliString p(static_cast<int>(text.size()));
  for (int q = 0; q < p.n_; ++q) {
    p.set_op(q, text[q]);
  }
  return p;
}

char PauliString::op(int q) const {
  const bool x = x_ & mask(q);
  const bool z = z_ & mask(q);
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliString::set_op(int q, char op) {
  if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  const std::uint64_t m = mask(q);
  x_ &= ~m;
  z_ &= ~m;
  switch (op) {
    case 'I': case 'i': case '_': break;
    case 'X': case 'x': x_ |= m; break;
    case 'Y': case 'y': x_ |= m; z_ |= m; break;
    case 'Z': case 'z': z_ |= m; break;
    default:
      throw std::invalid_argument(std::string("invalid Pauli character '") +
                                  op + "'");
  }
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int q = 0; q < n_; ++q) {
    if ((x_ | z_) & mask(q)) out.push_back(q);
  }
  return out;
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

std::string PauliString::str() const {
  std::string s(n_, 'I');
  for (int q = 0; q < n_; ++q) s[q] = op(q);
  return s;
}

Complex PhasedPauli::phase() const { return i_pow(phase_power); }

bool commutes(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  const int anti = std::popcount((a.x_bits() & b.z_bits()) ^
                                 (a.z_bits() & b.x_bits()));
  return anti % 2 == 0;
}

PhasedPauli multiply(const PauliString& a, const PauliString& b) {
  require_same_length(a, b);
  // (i^ya X^xa Z^za)(i^yb X^xb Z^zb) = i^(ya+yb) (-1)^(za·xb) X^(xa^xb) Z^(za^zb)
  // and the result re-expressed with i^yr for its own Y factors.
  const std::uint64_t xr = a.x_bits() ^ b.x_bits();
  const std::uint64_t zr = a.z_bits() ^ b.z_bits();
  PauliString r(a.n_qubits(), xr, zr);
  int power = y_count(a) + y_count(b) + 2 * std::popcount(a.z_bits() & b.x_bits()) -
              y_count(r);
  return {((power % 4) + 4) % 4, r};
}

int diagonal_sign(const PauliString& p, std::uint64_t bits) {
  if (!p.is_diagonal()) {
    throw std::invalid_argument("diagonal_sign needs an I/Z string, got " +
                                p.str());
  }
  return std::popcount(p.z_bits() & bits) % 2 ? -1 : 1;
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
  require_qubits(n_qubits);
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index;
  for (auto& t : terms) {
    if (t.string.n_qubits() != n_qubits) {
      throw std::invalid_argument("term " + t.string.str() + " has " +
                                  std::to_string(t.string.n_qubits()) +
                                  " qubits, sum has " +
                                  std::to_string(n_qubits));
    }
    const auto key = std::make_pair(t.string.x_bits(), t.string.z_bits());
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, terms_.size());
      terms_.push_back(std::move(t));
    } else {
      terms_[it->second].coeff += t.coeff;
    }
  }
}

PauliSum PauliSum::from_pairs(
    int n_qubits, const std::vector<std::pair<std::string, double>>& terms) {
  std::vector<PauliTerm> out;
  out.reserve(terms.size());
  for (const auto& [s, c] : terms) out.push_back({c, PauliString::parse(s)});
  return PauliSum(n_qubits, std::move(out));
}

double PauliSum::identity_coeff() const {
  double c = 0.0;
  for (const auto& t : terms_) {
    if (t.string.is_identity()) c += t.coeff;
  }
  return c;
}

std::vector<PauliTerm> PauliSum::non_identity_terms() const {
  std::vector<PauliTerm> out;
  for (const auto& t : terms_) {
    if (!t.string.is_identity()) out.push_back(t);
  }
  return out;
}

bool PauliSum::is_diagonal() const {
  for (const auto& t : terms_) {
    if (!t.string.is_diagonal()) return false;
  }
  return true;
}

double PauliSum::diagonal_value(std::uint64_t bits) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.coeff * diagonal_sign(t.string, bits);
  return v;
}

bool commutes_with_sum(const PauliSum& p, const PauliSum& q, double tolerance) {
  if (p.n_qubits() != q.n_qubits()) {
    throw std::invalid_argument("qubit-count mismatch in commutator");
  }
  std::map<std::pair<std::uint64_t, std::uint64_t>, Complex> acc;
  double scale = 0.0;
  for (const auto& a : p.terms()) {
    for (const auto& b : q.terms()) {
      if (commutes(a.string, b.string)) continue;
      const auto prod = multiply(a.string, b.string);
      const double w = 2.0 * a.coeff * b.coeff;
      acc[{prod.string.x_bits(), prod.string.z_bits()}] += w * prod.phase();
      scale = std::max(scale, std::abs(w));
    }
  }
  for (const auto& [key, c] : acc) {
    if (std::abs(c) > tolerance * std::max(1.0, scale)) return false;
  }
  return true;
}

double DenseOperator::hermiticity_error() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

DenseOperator to_dense(const PauliString& p) {
  require_dense(p.n_qubits());
  const std::int64_t dim = std::int64_t{1} << p.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const Complex yphase = i_pow(y_count(p));
  for (std::int64_t col = 0; col < dim; ++col) {
    const auto c = static_cast<std::uint64_t>(col);
    const double sign = std::popcount(p.z_bits() & c) % 2 ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(c ^ p.x_bits()), col) = yphase * sign;
  }
  return DenseOperator(std::move(m));
}

DenseOperator to_dense(const PauliSum& p) {
  require_dense(p.n_qubits());
  const std::int64_t dim = std::int64_t{1} << p.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : p.terms()) {
    const Complex yphase = i_pow(y_count(t.string));
    for (std::int64_t col = 0; col < dim; ++col) {
      const auto c = static_cast<std::uint64_t>(col);
      const double sign = std::popcount(t.string.z_bits() & c) % 2 ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(c ^ t.string.x_bits()), col) +=
          t.coeff * sign * yphase;
    }
  }
  return DenseOperator(std::move(m));
}

GroundState ground_state(const PauliSum& p) {
  const auto dense = to_dense(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed");
  }
  GroundState gs;
  gs.energy = solver.eigenvalues()(0);
  gs.state = solver.eigenvectors().col(0);
  gs.state.normalize();
  return gs;
}

StateVector apply(const PauliString& p, const StateVector& psi) {
  const std::int64_t dim = std::int64_t{1} << p.n_qubits();
  if (psi.size() != dim) {
    throw std::invalid_argument("state dimension does not match Pauli string");
  }
  StateVector out(dim);
  const Complex yphase = i_pow(y_count(p));
  for (std::int64_t j = 0; j < dim; ++j) {
    const auto b = static_cast<std::uint64_t>(j);
    const double sign = std::popcount(p.z_bits() & b) % 2 ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(b ^ p.x_bits())) = yphase * sign * psi(j);
  }
  return out;
}

Complex expectation_complex(const PauliString& p, const StateVector& psi) {
  const std::int64_t dim = std::int64_t{1} << p.n_qubits();
  if (psi.size() != dim) {
    throw std::invalid_argument("state dimension " +
                                std::to_string(psi.size()) +
                                " does not match " + p.str());
  }
  const Complex yphase = i_pow(y_count(p));
  Complex acc = 0.0;
  for (std::int64_t j = 0; j < dim; ++j) {
    const auto b = static_cast<std::uint64_t>(j);
    const double sign = std::popcount(p.z_bits() & b) % 2 ? -1.0 : 1.0;
    acc += std::conj(psi(static_cast<Eigen::Index>(b ^ p.x_bits()))) * sign *
           psi(j);
  }
  return yphase * acc;
}

namespace {

void require_normalized(const StateVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("state is not normalized (norm " +
                                std::to_string(psi.norm()) + ")");
  }
}

double real_part_checked(Complex v) {
  if (std::abs(v.imag()) > 1e-10) {
    throw std::runtime_error("expectation value has imaginary part " +
                             std::to_string(v.imag()));
  }
  return v.real();
}

}  // namespace

double expectation(const PauliString& p, const StateVector& psi) {
  require_normalized(psi);
  return real_part_checked(expectation_complex(p, psi));
}

double expectation(const PauliSum& p, const StateVector& psi) {
  require_normalized(psi);
  Complex acc = 0.0;
  for (const auto& t : p.terms()) {
    acc += t.coeff * expectation_complex(t.string, psi);
  }
  return real_part_checked(acc);
}

}  // namespace qemlab
