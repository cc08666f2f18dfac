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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qemlab/circuit.hpp"
#include "qemlab/mitigation.hpp"
#include "qemlab/noisy_sim.hpp"
#include "qemlab/pauli.hpp"

namespace qemlab {

/// Chemical precision in Hartree.
inline constexpr double kChemicalPrecision = 1.6e-3;

using AnsatzParams = std::array<double, 6>;

double ansatz_energy(const PauliSum& h, std::span<const double> params,
                     AnsatzForm form = AnsatzForm::Native);

/// Exact gradient by the parameter-shift rule with shifts of +-pi/2.
AnsatzParams parameter_shift_gradient(const PauliSum& h, std::span<const double> params,
                                      AnsatzForm form = AnsatzForm::Native);

struct AdamConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_iterations = 500;
  /// Stop once the energy is at or below this value.
  std::optional<double> target_energy;
};

struct VqeResult {
  AnsatzParams params{};
  double energy = 0.0;
  /// Energy before each update, then the final energy.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Noiseless statevector VQE with Adam. Non-convergence is reported in the
/// result, not thrown.
VqeResult vqe_train(const PauliSum& h, const AnsatzParams& init, const AdamConfig& config = {},
                    AnsatzForm form = AnsatzForm::Native);

struct GhzPoint {
  int n_qubits = 0;
  double f_raw = 0.0;
  double f_mem = 0.0;
  std::size_t cnots = 0;
};

inline constexpr int kMaxGhzQubits = 26;

/// GHZ fidelity per register size, with and without tensored MEM. Uses the
/// density engine when T1 damping is on (n <= 10), trajectories otherwise.
std::vector<GhzPoint> ghz_benchmark(const std::vector<int>& sizes, const NoiseModel& noise,
                                    std::uint64_t shots, std::uint64_t seed, bool with_mem = true,
                                    std::uint64_t calibration_shots = 1000000);

struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  std::filesystem::path hamiltonian;
  /// Empty means: train from the reference angles before benchmarking.
  std::optional<AnsatzParams> params = AnsatzParams{kReferenceAnsatzParams};
  std::string noise_spec = "falcon-like";
  NoiseModel noise = NoiseModel::falcon_like();
  std::vector<std::string> strategies = benchmark_strategy_names();
  std::uint64_t budget = 1000000;
  double prelim_fraction = 0.001;
  std::vector<int> lambdas{1, 2, 3, 4};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int resamples = 1000;
  std::uint64_t bootstrap_seed = 7;
  FitMethod fit = FitMethod::WLS;
  double tp_threshold = kDefaultTpThreshold;
  std::uint64_t calibration_shots = 1000000;
  std::filesystem::path output_dir;

  /// Throws std::invalid_argument on missing files or invalid strategies.
  void validate() const;
  StrategyOptions strategy_options() const;
  PauliSum load_hamiltonian() const;
};

/// Keys absent from `j` keep their defaults. `base` resolves relative paths.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base = {});
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct SeedRun {
  std::uint64_t seed = 0;
  double energy = 0.0;
  double bias = 0.0;
  double sigma = 0.0;
  double analytic_sigma = 0.0;
  std::optional<double> suppression;
  double retention = 1.0;
  std::optional<double> r_squared;
  std::uint64_t shots = 0;
  std::vector<double> bootstrap_estimates;
};

struct StrategyRow {
  std::string strategy;
  bool failed = false;
  std::string reason;
  std::vector<SeedRun> runs;
  double runtime_s = 0.0;

  /// Means over seeds; bias and sigma in Hartree.
  double bias() const;
  double sigma() const;
  double mse() const;
  std::optional<double> suppression() const;
  double retention() const;
  std::optional<double> r_squared() const;
  /// Number of seeds with strictly positive suppression.
  int positive_suppression_count() const;
};

struct BenchmarkReport {
  double exact_energy = 0.0;
  double reference_energy = 0.0;
  AnsatzParams params{};
  std::vector<StrategyRow> rows;

  const StrategyRow* find(const std::string& strategy) const;
  bool any_failed() const;
};

/// Runs every configured strategy for every seed. Bias is measured against
/// the exact ground energy; sigma is the bootstrap sigma. Strategy failures
/// are recorded and the run continues.
BenchmarkReport benchmark_matrix(const ExperimentConfig& cfg, int threads = 1);

/// Deterministic for a fixed config: runtimes are left out.
nlohmann::json to_json(const BenchmarkReport& r);
std::string to_csv(const BenchmarkReport& r);

/// config.json, results.json, results.csv, timing.json and
/// plotdata/histogram_<strategy>.csv (bootstrap estimates of the first seed).
void write_benchmark_outputs(const BenchmarkReport& r, const ExperimentConfig& cfg,
                             const std::filesystem::path& dir, int histogram_bins = 30);

struct ZneSeries {
  std::string label;
  std::vector<ZnePoint> points;
};

struct ZneCurve {
  std::string label;
  std::optional<ZneFit> wls;
  std::optional<ZneFit> ols;
  std::string error;
  std::vector<double> grid;
  std::vector<double> band_low;
  std::vector<double> band_high;
  /// Fraction of the grid where the WLS line lies inside the band.
  double band_coverage = 0.0;
};

/// WLS and OLS fits per series plus a 95% band from refits of Gaussian
/// resamples of the points.
std::vector<ZneCurve> zne_report(const std::vector<ZneSeries>& series, int resamples,
                                 std::uint64_t seed, double grid_max = 4.5, int grid_points = 46);

nlohmann::json to_json(const ZneCurve& c);
/// Columns lambda,wls,ols,band_low,band_high.
std::string zne_curve_csv(const ZneCurve& c);

}  // namespace qemlab
