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

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qemlab/circuit.hpp"
#include "qemlab/pauli.hpp"

namespace qemlab {

/// Computational-basis outcome. Qubit k of an m-bit outcome is bit (m-1-k),
/// i.e. the same convention as dense state indices.
using Bits = std::uint64_t;

std::string bits_to_string(Bits b, int n_bits);
Bits parse_bits(std::string_view text);

/// Multiset of measured bitstrings.
class MeasurementSet {
 public:
  MeasurementSet() = default;
  explicit MeasurementSet(int n_qubits);

  int n_qubits() const { return n_; }
  std::uint64_t shots() const { return shots_; }
  bool empty() const { return shots_ == 0; }
  const std::map<Bits, std::uint64_t>& counts() const { return counts_; }

  void add(Bits outcome, std::uint64_t count = 1);
  std::uint64_t count(Bits outcome) const;
  double frequency(Bits outcome) const;

  /// Associative union of two runs of the same register.
  void merge(const MeasurementSet& other);

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;

 private:
  int n_ = 0;
  std::uint64_t shots_ = 0;
  std::map<Bits, std::uint64_t> counts_;
};

/// Optional T1 relaxation, applied as amplitude damping after each gate on
/// the qubits it touches and once on every measured qubit before readout.
struct T1Damping {
  double t1_us = 100.0;
  double gate_1q_ns = 35.56;
  double gate_2q_ns = 471.11;
  double readout_ns = 0.0;

  double gamma(double duration_ns) const;
};

/// Gate and readout noise. Depolarizing noise follows every gate on that
/// gate's qubits; readout flips act classically on sampled bits.
struct NoiseModel {
  std::string name = "custom";
  double p_dep_1q = 0.0;
  double p_dep_2q = 0.0;
  /// One entry per qubit, or a single entry applied to every qubit.
  std::vector<double> readout_flip{0.0};
  std::optional<T1Damping> t1_damping;

  double flip(int qubit) const;
  bool has_gate_noise() const;
  bool is_noiseless() const;
  /// Throws std::invalid_argument when a probability leaves [0, 1].
  void validate() const;

  static NoiseModel ideal();
  /// 2q 7e-3, 1q 2.2e-4, readout 1.4e-2: one 27-qubit Falcon device's
  /// calibration snapshot, rounded.
  static NoiseModel falcon_like();
  static NoiseModel by_name(std::string_view name);
};

/// Mixed state of up to kMaxDensityQubits qubits, column-major.
class DensityMatrix {
 public:
  explicit DensityMatrix(int n_qubits);

  int n_qubits() const { return n_; }
  std::int64_t dim() const { return dim_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }

  void apply_unitary(const Gate& g);
  /// (1-p)ρ + p/(4^k-1) Σ_{P≠I} PρP over the k qubits listed.
  void depolarize(std::span<const int> qubits, double p);
  void amplitude_damp(int qubit, double gamma);

  double trace() const;
  /// Trace, hermiticity and positivity within `tol`.
  bool is_physical(double tol = 1e-10) const;
  std::vector<double> diagonal() const;

 private:
  int n_;
  std::int64_t dim_;
  Eigen::MatrixXcd rho_;
};

inline constexpr int kMaxDensityQubits = 10;

/// Rotations that map a measurement in `basis` to a Z measurement on the
/// circuit's measured qubits: X→H, Y→S†H, I/Z→nothing.
Circuit measurement_rotation(const PauliString& basis,
                             const std::vector<int>& measured);

/// Evolves ρ through c (plus basis rotations) under `noise` and returns the
/// exact pre-readout outcome distribution over the measured qubits.
std::vector<double> density_probabilities(const Circuit& c,
                                          const NoiseModel& noise,
                                          const PauliString& basis);

/// Final density matrix of c under noise (no basis rotation, no readout).
DensityMatrix evolve_density(const Circuit& c, const NoiseModel& noise);

/// Tensored classical bit-flip channel applied to a distribution.
std::vector<double> apply_readout_flips(const std::vector<double>& probs,
                                        int n_bits,
                                        const std::vector<double>& flips);

/// Samples `shots` outcomes from a probability vector.
MeasurementSet sample_distribution(const std::vector<double>& probs,
                                   int n_bits, std::uint64_t shots,
                                   std::mt19937_64& rng);

/// Density-matrix execution with sampling; deterministic given the seed.
/// The readout flips are folded into the outcome distribution before
/// sampling, which is equal in law to flipping each sampled bit.
MeasurementSet run_density(const Circuit& c, const NoiseModel& noise,
                           const PauliString& basis, std::uint64_t shots,
                           std::uint64_t seed);

/// Monte-Carlo Pauli trajectories. Clifford circuits use Pauli-frame
/// propagation over a single ideal statevector; other circuits group shots
/// by their sampled error pattern. Rejects T1 damping.
MeasurementSet run_trajectories(const Circuit& c, const NoiseModel& noise,
                                std::uint64_t shots, std::uint64_t seed,
                                const std::optional<PauliString>& basis = std::nullopt);

bool is_clifford(const Circuit& c);

/// ½(√p₀ + √p₁)² from the all-zeros / all-ones frequencies.
double ghz_fidelity(const MeasurementSet& m);
double ghz_fidelity(double p_zeros, double p_ones);

/// Stable 64-bit stream seed derived from a root seed and a tag.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag);

/// Total-variation distance between two empirical distributions.
double total_variation(const MeasurementSet& a, const MeasurementSet& b);

}  // namespace qemlab
