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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qemlab/circuit.hpp"
#include "qemlab/noisy_sim.hpp"
#include "qemlab/pauli.hpp"
#include "qemlab/stats.hpp"

namespace qemlab {

struct Estimate {
  double value = 0.0;
  double variance = 0.0;
};

/// Signed weights over bitstrings, from normalized frequencies or after
/// readout inversion. `shots` is the number of samples behind it.
struct QuasiDistribution {
  int n_bits = 0;
  std::map<Bits, double> weights;
  double shots = 0.0;

  double mass() const;
  static QuasiDistribution from(const MeasurementSet& m);
};

/// +1/-1 parity of the bits at positions k (bit k of an n-bit outcome is
/// character k of its string).
int parity_sign(Bits b, int n_bits, std::span<const int> positions);

/// sum_b sign(b) w(b) / sum_b w(b).
double parity_expectation(const QuasiDistribution& d, std::span<const int> positions);

/// Mean of the ±1 eigenvalue of p over the shots, variance (1 - v^2)/M.
/// When `basis` is given every qubit in the support of p must have been
/// measured in p's own basis.
Estimate raw_estimate(const MeasurementSet& m, const PauliString& p,
                      const std::optional<PauliString>& basis = std::nullopt);

/// h_I + sum h_i <P_i> with variance sum h_i^2 var_i. Throws when a
/// non-identity term of h is missing.
Estimate energy_estimate(const std::map<PauliString, Estimate>& per_term, const PauliSum& h);

/// Smallest |1 - 2 p_k| MEM will invert.
inline constexpr double kMinReadoutContrast = 1e-2;

/// Tensor product of symmetric single-qubit readout channels
/// A^(k) = [[1-p_k, p_k], [p_k, 1-p_k]].
class AssignmentMatrix {
 public:
  explicit AssignmentMatrix(std::vector<double> flips);

  int n_qubits() const { return static_cast<int>(flips_.size()); }
  const std::vector<double>& flips() const { return flips_; }
  Eigen::Matrix2d single(int k) const;
  Eigen::Matrix2d single_inverse(int k) const;

  /// A_{measured, ideal}: probability of reading `measured` from `ideal`.
  double element(Bits measured, Bits ideal) const;
  /// Full 2^n x 2^n matrix; n <= kMaxDenseQubits.
  Eigen::MatrixXd dense() const;
  /// prod_k (1 - 2 p_k) over the given positions.
  double parity_attenuation(std::span<const int> positions) const;

 private:
  std::vector<double> flips_;
};

/// One (|0>-prepared, |1>-prepared) pair of single-bit calibration sets per
/// qubit; p_k is the mean of the two flip frequencies.
AssignmentMatrix mem_build(const std::vector<std::pair<MeasurementSet, MeasurementSet>>& calibration);

/// Runs the 2N calibration circuits on the simulator.
std::vector<std::pair<MeasurementSet, MeasurementSet>> run_calibration(const NoiseModel& noise,
                                                                       int n_qubits,
                                                                       std::uint64_t shots,
                                                                       std::uint64_t seed);

/// Tensored inverse applied to an empirical distribution. Negative entries
/// are kept. Throws std::domain_error when some |1 - 2 p_k| < kMinReadoutContrast.
QuasiDistribution mem_apply(const AssignmentMatrix& a, const QuasiDistribution& d);
QuasiDistribution mem_apply(const AssignmentMatrix& a, const MeasurementSet& m);
/// Dense version over a full distribution vector.
std::vector<double> mem_apply(const AssignmentMatrix& a, const std::vector<double>& probs);

/// Mitigated quasi-probability of one outcome, sum_x prod_k Ainv_k[y_k, x_k] p(x),
/// evaluated over the observed outcomes only (usable at any register size).
double mem_quasi_probability(const AssignmentMatrix& a, const MeasurementSet& m, Bits target);

/// Conserved quantities used for post-selection. Every operator is diagonal.
class SymmetryConstraint {
 public:
  struct Operator {
    std::string name;
    PauliSum op;
    std::vector<double> allowed;
  };

  /// Throws std::invalid_argument for non-diagonal operators or, when a
  /// Hamiltonian is given, operators that do not commute with it.
  explicit SymmetryConstraint(std::vector<Operator> ops,
                              const std::optional<PauliSum>& hamiltonian = std::nullopt);

  int n_qubits() const { return n_; }
  const std::vector<Operator>& operators() const { return ops_; }
  bool allows(Bits b) const;
  std::vector<Bits> allowed_states() const;

  /// Particle number and spin-z of the shipped 3-qubit problem.
  static SymmetryConstraint hcl(const std::optional<PauliSum>& hamiltonian = std::nullopt);

 private:
  int n_ = 0;
  std::vector<Operator> ops_;
};

/// Thrown when post-selection keeps nothing.
class EmptyPostSelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MeasurementSet sv_filter(const MeasurementSet& m, const SymmetryConstraint& c);
/// Keeps allowed outcomes and renormalizes by the retained quasi-mass.
/// `shots` becomes the retained sample count.
QuasiDistribution sv_filter(const QuasiDistribution& d, const SymmetryConstraint& c);

enum class FitMethod { WLS, OLS };
std::string_view fit_method_name(FitMethod m);

struct ZnePoint {
  int lambda = 1;
  double estimate = 0.0;
  double variance = 0.0;
};

struct ZneFit {
  FitMethod method = FitMethod::WLS;
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  /// Propagated from the point variances (sandwich form for OLS). When all
  /// variances are zero, the OLS residual-based error instead.
  double stderr_intercept = 0.0;

  double at(double lambda) const { return intercept + slope * lambda; }
};

/// Linear fit E = E0 + beta * lambda. WLS weights are 1/variance.
ZneFit zne_fit(const std::vector<ZnePoint>& points, FitMethod method = FitMethod::WLS);

/// Ancilla expectation after post-selecting the system register on |0...0>.
/// The ancilla is the last bit.
struct AncillaReadout {
  double expectation = 0.0;
  double retention = 0.0;
  double retained_shots = 0.0;
};

AncillaReadout ancilla_readout(const QuasiDistribution& d);

inline constexpr double kDivergenceEpsilon = 1e-6;

/// E^Z / (1 + E^X). Throws std::domain_error when 1 + E^X < kDivergenceEpsilon.
double dsp_combine(double ex, double ez);
/// <Z> / (1 + sqrt(1 - <Z>^2)).
double dsp_z_only(double ez);

struct XOnlyEstimate {
  double magnitude = 0.0;
  bool sign_known = false;
};
/// sqrt((1 - <X>) / (1 + <X>)); the sign is not recoverable.
XOnlyEstimate dsp_x_only(double ex);

struct DspEstimate {
  double value = 0.0;
  double variance = 0.0;
  double ex = 0.0;
  double ez = 0.0;
  double retention = 0.0;
  bool diverged = false;
};

/// Combined estimate from the X- and Z-basis ancilla sets. On divergence
/// the Z-only reconstruction is returned with `diverged` set.
DspEstimate dsp_estimate(const MeasurementSet& mx, const MeasurementSet& mz);
DspEstimate dsp_estimate(const QuasiDistribution& dx, const QuasiDistribution& dz);
double dsp_estimate_z_only(const MeasurementSet& mz);
XOnlyEstimate dsp_estimate_x_only(const MeasurementSet& mx);

struct AncillaTomogram {
  double gx = 0.0;
  double gy = 0.0;
  double gz = 0.0;
};

struct PurifiedEstimate {
  double value = 0.0;
  bool purified = false;
  /// The positive-X eigenvector was not the dominant one.
  bool minority_selected = false;
  bool degenerate = false;
};

inline constexpr double kDefaultTpThreshold = 0.05;

/// Projects the ancilla Bloch vector onto the eigenvector with non-negative
/// X and returns n_z / (1 + n_x). A dominant direction with n_x < 0 is
/// flipped to the minority eigenvector only when it points mostly along -X
/// (|n_x| > |n_z| and n_x < -x_tolerance); otherwise it is taken to sit on
/// the X = 0 boundary (noise around a term with <P> = +-1) and clamped there. Below the |gamma_Z| threshold, or for a maximally mixed
/// tomogram, the unpurified combination is returned.
PurifiedEstimate tomography_purify(const AncillaTomogram& t,
                                   double z_threshold = kDefaultTpThreshold,
                                   double x_tolerance = kDefaultTpThreshold);

enum class Technique { MEM, SV, DSP, TP, ZNE };
std::string_view technique_name(Technique t);

/// A set of techniques, always applied in the order MEM, SV, DSP, TP, ZNE.
class Strategy {
 public:
  Strategy() = default;

  /// Accepts "RAW", "" or '+'-joined technique names in any order and case.
  /// Throws std::invalid_argument on unknown names or incompatible sets.
  static Strategy parse(std::string_view spec);
  /// Reason the set is not allowed, if any.
  static std::optional<std::string> incompatibility(const std::vector<Technique>& ts);

  bool has(Technique t) const;
  const std::vector<Technique>& techniques() const { return techniques_; }
  bool is_raw() const { return techniques_.empty(); }
  std::string name() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  std::vector<Technique> techniques_;
};

/// RAW followed by the fifteen mitigated strategies of the benchmark table.
const std::vector<std::string>& benchmark_strategy_names();

struct StrategyOptions {
  std::vector<int> lambdas{1, 2, 3, 4};
  FitMethod fit = FitMethod::WLS;
  double tp_threshold = kDefaultTpThreshold;
  /// Coupling used to lay out DSP circuits; nullopt means all-to-all.
  std::optional<CouplingMap> coupling = CouplingMap::dsp_cluster();
  AnsatzForm ansatz_form = AnsatzForm::Native;
  /// Shots per calibration circuit; not part of the shot budget.
  std::uint64_t calibration_shots = 1000000;
  std::optional<SymmetryConstraint> symmetry;
};

/// All samples a strategy consumed.
struct StrategyData {
  Strategy strategy;
  ShotPlan plan;
  std::map<ShotKey, MeasurementSet> sets;
  std::optional<AssignmentMatrix> readout;
  /// Circuits of the DSP readout, keyed by term (empty without DSP).
  std::map<PauliString, DspCircuit> dsp_circuits;
};

struct TermDiagnostics {
  PauliString term;
  double coeff = 0.0;
  int lambda = 1;
  double value = 0.0;
  double variance = 0.0;
  std::uint64_t shots = 0;
  double retention = 1.0;
  bool purified = false;
  bool diverged = false;
};

struct EstimatorResult {
  std::string strategy;
  double energy = 0.0;
  double variance = 0.0;
  std::uint64_t shots = 0;
  double mean_retention = 1.0;
  std::vector<ZnePoint> zne_points;
  std::optional<ZneFit> zne;
  std::vector<TermDiagnostics> terms;
};

/// Circuit whose samples answer `key`: the ansatz with the term's basis
/// rotation, or the DSP circuit, amplified by key.lambda.
struct PreparedCircuit {
  Circuit circuit;
  PauliString basis;
};
PreparedCircuit prepare_circuit(const Strategy& s, const Circuit& ansatz, const ShotKey& key,
                                const StrategyOptions& options, const NoiseModel& noise);

/// Preliminary raw estimates of every term, for shot planning. Each is the
/// Laplace-smoothed mean (n+ - n-)/(M + 2).
std::map<PauliString, double> preliminary_estimates(const PauliSum& h, const Circuit& ansatz,
                                                    const NoiseModel& noise,
                                                    const std::map<PauliString, std::uint64_t>& shots,
                                                    std::uint64_t seed);

PlanMode plan_mode(const Strategy& s, const StrategyOptions& options);

/// Preliminary phase plus allocation for one strategy.
ShotPlan make_shot_plan(const Strategy& s, const PauliSum& h, const Circuit& ansatz,
                        const NoiseModel& noise, std::uint64_t budget, double prelim_fraction,
                        std::uint64_t seed, const StrategyOptions& options);

StrategyData acquire_data(const Strategy& s, const PauliSum& h, const Circuit& ansatz,
                          const NoiseModel& noise, const ShotPlan& plan, std::uint64_t seed,
                          const StrategyOptions& options);

/// Pure post-processing of acquired samples. `sets` may be a resampled copy
/// of data.sets with identical keys.
EstimatorResult estimate_from_data(const StrategyData& data, const PauliSum& h,
                                   const StrategyOptions& options);

/// Plan, acquire and estimate.
EstimatorResult run_strategy(const Strategy& s, const PauliSum& h, std::span<const double> params,
                             const NoiseModel& noise, std::uint64_t budget, double prelim_fraction,
                             std::uint64_t seed, const StrategyOptions& options = {});
EstimatorResult run_strategy(const Strategy& s, const PauliSum& h, std::span<const double> params,
                             const NoiseModel& noise, const ShotPlan& plan, std::uint64_t seed,
                             const StrategyOptions& options = {});

struct Metrics {
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  /// (1 - |bias / raw bias|) * 100; absent without a raw baseline or when
  /// the raw bias is zero.
  std::optional<double> suppression;
};

std::optional<double> error_suppression(double bias, double raw_bias);
Metrics metrics(double estimate, double variance, double truth,
                std::optional<double> raw_bias = std::nullopt);
Metrics metrics(const EstimatorResult& r, double truth,
                std::optional<double> raw_bias = std::nullopt);

nlohmann::json to_json(const ZneFit& f);
nlohmann::json to_json(const EstimatorResult& r);

}  // namespace qemlab
