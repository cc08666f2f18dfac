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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qemlab {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

/// Largest register handled by the dense-matrix oracle.
inline constexpr int kMaxDenseQubits = 12;

/// A tensor product of single-qubit Paulis, stored symplectically.
///
/// Qubit 0 is the leftmost character of the string form ("XIZ" has X on
/// qubit 0) and the most significant bit of a basis-state index, so the
/// x/z masks line up with dense matrix indices. Up to 64 qubits. Signs are
/// not part of the string; products return their phase separately.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);
  PauliString(int n_qubits, std::uint64_t x_bits, std::uint64_t z_bits);

  /// Parses "IXYZ"-style text; also accepts '_' for identity.
  static PauliString parse(std::string_view text);

  int n_qubits() const { return n_; }
  std::uint64_t x_bits() const { return x_; }
  std::uint64_t z_bits() const { return z_; }

  /// 'I', 'X', 'Y' or 'Z' on qubit q.
  char op(int q) const;
  void set_op(int q, char op);

  bool is_identity() const { return (x_ | z_) == 0; }
  /// True when the string only has I and Z factors.
  bool is_diagonal() const { return x_ == 0; }
  /// Qubits carrying a non-identity factor, ascending.
  std::vector<int> support() const;
  int weight() const;

  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

  /// Bit of qubit q in x_bits()/z_bits() and in basis-state indices.
  std::uint64_t mask(int q) const { return std::uint64_t{1} << (n_ - 1 - q); }

 private:
  int n_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Phase i^k (k mod 4) times a Pauli string.
struct PhasedPauli {
  int phase_power = 0;
  PauliString string;

  Complex phase() const;
};

/// Throws std::invalid_argument on length mismatch.
bool commutes(const PauliString& a, const PauliString& b);

/// Exact operator product a·b including the phase.
PhasedPauli multiply(const PauliString& a, const PauliString& b);

/// Eigenvalue (+1/-1) of a diagonal string on a computational basis state.
int diagonal_sign(const PauliString& p, std::uint64_t bits);

struct PauliTerm {
  double coeff = 0.0;
  PauliString string;
};

/// Real-weighted sum of Pauli strings over a fixed register size.
///
/// Duplicate strings are merged on construction; terms keep the order of
/// first appearance so file order (e.g. by coefficient magnitude) survives.
class PauliSum {
 public:
  PauliSum() = default;
  PauliSum(int n_qubits, std::vector<PauliTerm> terms);

  static PauliSum from_pairs(
      int n_qubits, const std::vector<std::pair<std::string, double>>& terms);

  int n_qubits() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of the all-identity string (0 if absent).
  double identity_coeff() const;
  /// Terms other than the identity, in order.
  std::vector<PauliTerm> non_identity_terms() const;
  bool is_diagonal() const;

  /// Value of a diagonal sum on a computational basis state.
  double diagonal_value(std::uint64_t bits) const;

 private:
  int n_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Symbolic test for [p, q] = 0: anticommuting pairs contribute 2·p_i·q_j·P_iQ_j
/// which are accumulated per string and must all cancel.
bool commutes_with_sum(const PauliSum& p, const PauliSum& q,
                       double tolerance = 1e-12);

class DenseOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  const Eigen::MatrixXcd& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double hermiticity_error() const;

 private:
  Eigen::MatrixXcd m_;
};

DenseOperator to_dense(const PauliString& p);
DenseOperator to_dense(const PauliSum& p);

struct GroundState {
  double energy = 0.0;
  StateVector state;
};

GroundState ground_state(const PauliSum& p);

/// <ψ|p|ψ> for a single string, applied matrix-free.
Complex expectation_complex(const PauliString& p, const StateVector& psi);

/// Throws on dimension mismatch or when ‖ψ‖ deviates from 1 by more than 1e-8.
double expectation(const PauliSum& p, const StateVector& psi);
double expectation(const PauliString& p, const StateVector& psi);

/// Applies a Pauli string to a state (dense index convention).
StateVector apply(const PauliString& p, const StateVector& psi);

}  // namespace qemlab
