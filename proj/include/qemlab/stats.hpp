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

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qemlab/noisy_sim.hpp"
#include "qemlab/pauli.hpp"

namespace qemlab {

/// Which circuit a batch of shots goes to. `basis` is 'P' for a term measured
/// in its own eigenbasis, or the ancilla basis 'X', 'Y', 'Z' under DSP.
struct ShotKey {
  PauliString term;
  int lambda = 1;
  char basis = 'P';

  friend bool operator==(const ShotKey&, const ShotKey&) = default;
  friend auto operator<=>(const ShotKey&, const ShotKey&) = default;
  std::string str() const;
};

/// Circuits per term: DSP measures the ancilla in X and Z (plus Y with
/// tomography); ZNE repeats everything at each noise factor.
struct PlanMode {
  bool dsp = false;
  bool tp = false;
  std::vector<int> lambdas{1};

  std::vector<char> bases() const;
  std::string name() const;
};

struct ShotPlan {
  std::uint64_t budget = 0;
  double prelim_fraction = 0.0;
  PlanMode mode;
  std::map<PauliString, std::uint64_t> preliminary;
  /// v_P = |h_P| sqrt(1 - <P>^2) from the preliminary estimates.
  std::map<PauliString, double> weights;
  std::map<ShotKey, std::uint64_t> allocations;

  std::uint64_t preliminary_total() const;
  std::uint64_t main_total() const;
  std::uint64_t total() const { return preliminary_total() + main_total(); }
};

/// Rounds total * w_i / sum(w) to integers summing to `total` exactly
/// (largest remainder, ties to the lower index). All-zero weights split evenly.
std::vector<std::uint64_t> largest_remainder(const std::vector<double>& weights,
                                             std::uint64_t total);

/// Equal split of round(b * B) preliminary shots over the non-identity terms.
std::map<PauliString, std::uint64_t> preliminary_split(const PauliSum& h, std::uint64_t budget,
                                                       double prelim_fraction);

inline constexpr std::uint64_t kZeroVarianceFloor = 100;

/// Main-phase allocation proportional to v_P, split evenly over the circuits
/// of each term. Circuits of terms with v_P = 0 get kZeroVarianceFloor shots.
/// Throws std::invalid_argument when the budget cannot cover the plan.
ShotPlan plan_shots(const PauliSum& h, const std::map<PauliString, double>& prelim,
                    std::uint64_t budget, double prelim_fraction, const PlanMode& mode);

/// (1/R^2) sum_{r<s} (E_r - E_s)^2.
double pairwise_variance(const std::vector<double>& estimates);
double sample_variance(const std::vector<double>& xs);

struct NormalityTest {
  double skew_z = 0.0;
  double kurtosis_z = 0.0;
  double k2 = 0.0;
  double p_value = 0.0;
};

/// D'Agostino-Pearson omnibus test. Needs at least 20 values.
NormalityTest dagostino_pearson(const std::vector<double>& xs);

/// Multinomial resample of a set using its own empirical frequencies.
MeasurementSet resample(const MeasurementSet& m, std::mt19937_64& rng);

struct BootstrapReport {
  int resamples = 0;
  std::vector<double> estimates;
  double mean = 0.0;
  double variance = 0.0;
  double normality_p = 0.0;
  /// Resamples on which the estimator threw; excluded from the estimates.
  int failures = 0;

  double sigma() const;
};

using SetEstimator = std::function<double(const std::vector<MeasurementSet>&)>;

/// Resamples every set independently R times. Resample r uses its own
/// stream derived from (seed, r), so results do not depend on `threads`.
BootstrapReport bootstrap(const std::vector<MeasurementSet>& sets, const SetEstimator& estimator,
                          int resamples, std::uint64_t seed, int threads = 1);
BootstrapReport bootstrap(const MeasurementSet& m,
                          const std::function<double(const MeasurementSet&)>& estimator,
                          int resamples, std::uint64_t seed, int threads = 1);

struct SigmaAgreement {
  double empirical_sigma = 0.0;
  std::vector<double> estimates;
  std::vector<double> bootstrap_sigmas;
  std::vector<double> normality_p;
  double max_abs_delta = 0.0;
};

/// Spread of the point estimates across independent experiments against the
/// bootstrap sigma of each single experiment. Needs at least 30 experiments.
SigmaAgreement sigma_agreement(const std::vector<std::vector<MeasurementSet>>& experiments,
                               const SetEstimator& estimator, int resamples, std::uint64_t seed,
                               int threads = 1);

}  // namespace qemlab
