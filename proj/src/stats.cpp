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

#include "qemlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qemlab {

std::string ShotKey::str() const {
  return term.str() + "|" + std::to_string(lambda) + "|" + std::string(1, basis);
}

std::vector<char> PlanMode::bases() const {
  if (!dsp) return {'P'};
  if (tp) return {'X', 'Y', 'Z'};
  return {'X', 'Z'};
}

std::string PlanMode::name() const {
  std::string s = dsp ? (tp ? "DSP+TP" : "DSP") : "plain";
  if (lambdas.size() > 1) s += "+ZNE(" + std::to_string(lambdas.size()) + ")";
  return s;
}

std::uint64_t ShotPlan::preliminary_total() const {
  std::uint64_t t = 0;
  for (const auto& [k, v] : preliminary) t += v;
  return t;
}

std::uint64_t ShotPlan::main_total() const {
  std::uint64_t t = 0;
  for (const auto& [k, v] : allocations) t += v;
  return t;
}

std::vector<std::uint64_t> largest_remainder(const std::vector<double>& weights,
                                             std::uint64_t total) {
  const std::size_t n = weights.size();
  if (n == 0) {
    if (total != 0) throw std::invalid_argument("nothing to allocate to");
    return {};
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be >= 0");
    sum += w;
  }
  std::vector<double> share(n);
  for (std::size_t i = 0; i < n; ++i) {
    share[i] = sum > 0.0 ? static_cast<double>(total) * weights[i] / sum
                         : static_cast<double>(total) / static_cast<double>(n);
  }
  std::vector<std::uint64_t> out(n);
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<std::uint64_t>(std::floor(share[i]));
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
  });
  // Floating error can leave assigned slightly off either way.
  for (std::size_t k = 0; assigned < total; k = (k + 1) % n) {
    ++out[order[k]];
    ++assigned;
  }
  for (std::size_t k = n; assigned > total;) {
    k = (k + n - 1) % n;
    if (out[order[k]] > 0) {
      --out[order[k]];
      --assigned;
    }
  }
  return out;
}

std::map<PauliString, std::uint64_t> preliminary_split(const PauliSum& h, std::uint64_t budget,
                                                       double prelim_fraction) {
  if (!(prelim_fraction > 0.0 && prelim_fraction < 1.0)) {
    throw std::invalid_argument("preliminary fraction must lie in (0, 1)");
  }
  const auto terms = h.non_identity_terms();
  const auto prelim =
      static_cast<std::uint64_t>(std::llround(prelim_fraction * static_cast<double>(budget)));
  if (prelim < terms.size()) throw std::invalid_argument("budget too small for preliminary phase");
  const auto split = largest_remainder(std::vector<double>(terms.size(), 1.0), prelim);
  std::map<PauliString, std::uint64_t> out;
  for (std::size_t i = 0; i < terms.size(); ++i) out[terms[i].string] = split[i];
  return out;
}

ShotPlan plan_shots(const PauliSum& h, const std::map<PauliString, double>& prelim,
                    std::uint64_t budget, double prelim_fraction, const PlanMode& mode) {
  if (mode.lambdas.empty()) throw std::invalid_argument("at least one noise factor required");
  ShotPlan plan;
  plan.budget = budget;
  plan.prelim_fraction = prelim_fraction;
  plan.mode = mode;
  plan.preliminary = preliminary_split(h, budget, prelim_fraction);
  const std::uint64_t main = budget - plan.preliminary_total();

  const auto bases = mode.bases();
  std::vector<ShotKey> keys;
  std::vector<double> weights;
  std::uint64_t floors = 0;
  for (const auto& t : h.non_identity_terms()) {
    auto it = prelim.find(t.string);
    if (it == prelim.end()) throw std::invalid_argument("no preliminary estimate for " + t.string.str());
    const double p = std::clamp(it->second, -1.0, 1.0);
    const double v = std::abs(t.coeff) * std::sqrt(1.0 - p * p);
    plan.weights[t.string] = v;
    for (int lambda : mode.lambdas) {
      for (char b : bases) {
        keys.push_back({t.string, lambda, b});
        weights.push_back(v);
        if (v == 0.0) floors += kZeroVarianceFloor;
      }
    }
  }
  if (floors > main) throw std::invalid_argument("budget too small for the shot floors");
  std::size_t positive = 0;
  for (double w : weights) positive += w > 0.0;
  if (main - floors < positive) throw std::invalid_argument("budget too small for the plan");

  std::vector<std::uint64_t> alloc;
  if (positive == 0) {
    // Every circuit already has its floor; spread the rest evenly.
    alloc = largest_remainder(std::vector<double>(keys.size(), 1.0), main - floors);
    for (auto& a : alloc) a += kZeroVarianceFloor;
  } else {
    alloc = largest_remainder(weights, main - floors);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (weights[i] == 0.0) alloc[i] = kZeroVarianceFloor;
    }
    // Every weighted circuit gets at least one shot, taken from the largest.
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (weights[i] > 0.0 && alloc[i] == 0) {
        auto donor = std::max_element(alloc.begin(), alloc.end());
        --*donor;
        alloc[i] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < keys.size(); ++i) plan.allocations[keys[i]] = alloc[i];
  return plan;
}

double pairwise_variance(const std::vector<double>& estimates) {
  const std::size_t r = estimates.size();
  if (r < 2) throw std::invalid_argument("need at least two estimates");
  // sum_{r<s} (E_r - E_s)^2 = R sum E^2 - (sum E)^2, computed about the mean.
  double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(r);
  double ss = 0.0;
  for (double e : estimates) ss += (e - mean) * (e - mean);
  return ss / static_cast<double>(r);
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) throw std::invalid_argument("need at least two values");
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

NormalityTest dagostino_pearson(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 20) throw std::invalid_argument("normality test needs at least 20 values");
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  NormalityTest out;
  if (m2 <= 0.0) {
    out.p_value = 0.0;
    out.k2 = std::numeric_limits<double>::infinity();
    return out;
  }

  const double b1 = m3 / std::pow(m2, 1.5);
  double y = b1 * std::sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)));
  const double beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) /
                       ((n - 2.0) * (n + 5) * (n + 7) * (n + 9));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  if (y == 0.0) y = 1.0;
  out.skew_z = delta * std::log(y / alpha + std::sqrt((y / alpha) * (y / alpha) + 1.0));

  const double b2 = m4 / (m2 * m2);
  const double e = 3.0 * (n - 1) / (n + 1);
  const double varb2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
  const double x = (b2 - e) / std::sqrt(varb2);
  const double sqrtbeta1 = 6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) *
                           std::sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)));
  const double a = 6.0 + 8.0 / sqrtbeta1 *
                             (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  const double term2 = denom == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                    : std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  out.kurtosis_z = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

  out.k2 = out.skew_z * out.skew_z + out.kurtosis_z * out.kurtosis_z;
  // Survival function of chi-squared with two degrees of freedom.
  out.p_value = std::exp(-0.5 * out.k2);
  return out;
}

MeasurementSet resample(const MeasurementSet& m, std::mt19937_64& rng) {
  if (m.empty()) throw std::invalid_argument("cannot resample an empty set");
  MeasurementSet out(m.n_qubits());
  std::uint64_t remaining = m.shots();
  std::uint64_t mass = m.shots();
  for (const auto& [b, c] : m.counts()) {
    if (remaining == 0) break;
    std::uint64_t k = remaining;
    if (c < mass) {
      std::binomial_distribution<std::uint64_t> bin(
          remaining, static_cast<double>(c) / static_cast<double>(mass));
      k = bin(rng);
    }
    out.add(b, k);
    remaining -= k;
    mass -= c;
  }
  return out;
}

double BootstrapReport::sigma() const { return std::sqrt(variance); }

BootstrapReport bootstrap(const std::vector<MeasurementSet>& sets, const SetEstimator& estimator,
                          int resamples, std::uint64_t seed, int threads) {
  if (resamples < 2) throw std::invalid_argument("need at least two resamples");
  if (sets.empty()) throw std::invalid_argument("no measurement sets");
  for (const auto& s : sets) {
    if (s.empty()) throw std::invalid_argument("empty measurement set");
  }
  std::vector<double> values(static_cast<std::size_t>(resamples));
  std::vector<char> ok(static_cast<std::size_t>(resamples), 0);
  auto work = [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      std::mt19937_64 rng(derive_seed(seed, "bootstrap|" + std::to_string(r)));
      std::vector<MeasurementSet> drawn;
      drawn.reserve(sets.size());
      for (const auto& s : sets) drawn.push_back(resample(s, rng));
      try {
        values[static_cast<std::size_t>(r)] = estimator(drawn);
        ok[static_cast<std::size_t>(r)] = 1;
      } catch (const std::exception&) {
      }
    }
  };
  threads = std::clamp(threads, 1, resamples);
  if (threads == 1) {
    work(0, resamples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (resamples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int b = t * chunk;
      const int e = std::min(resamples, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  BootstrapReport rep;
  rep.resamples = resamples;
  for (int r = 0; r < resamples; ++r) {
    if (ok[static_cast<std::size_t>(r)]) {
      rep.estimates.push_back(values[static_cast<std::size_t>(r)]);
    } else {
      ++rep.failures;
    }
  }
  if (rep.estimates.size() < 2) throw std::runtime_error("bootstrap estimator failed on most resamples");
  rep.mean = std::accumulate(rep.estimates.begin(), rep.estimates.end(), 0.0) /
             static_cast<double>(rep.estimates.size());
  rep.variance = pairwise_variance(rep.estimates);
  rep.normality_p = rep.estimates.size() >= 20 ? dagostino_pearson(rep.estimates).p_value : 1.0;
  return rep;
}

BootstrapReport bootstrap(const MeasurementSet& m,
                          const std::function<double(const MeasurementSet&)>& estimator,
                          int resamples, std::uint64_t seed, int threads) {
  return bootstrap(
      std::vector<MeasurementSet>{m},
      [&](const std::vector<MeasurementSet>& s) { return estimator(s.front()); }, resamples, seed,
      threads);
}

SigmaAgreement sigma_agreement(const std::vector<std::vector<MeasurementSet>>& experiments,
                               const SetEstimator& estimator, int resamples, std::uint64_t seed,
                               int threads) {
  if (experiments.size() < 30) throw std::invalid_argument("need at least 30 experiments");
  SigmaAgreement out;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    out.estimates.push_back(estimator(experiments[i]));
    const auto rep = bootstrap(experiments[i], estimator, resamples,
                               derive_seed(seed, "experiment|" + std::to_string(i)), threads);
    out.bootstrap_sigmas.push_back(rep.sigma());
    out.normality_p.push_back(rep.normality_p);
  }
  out.empirical_sigma = std::sqrt(sample_variance(out.estimates));
  for (double s : out.bootstrap_sigmas) {
    out.max_abs_delta = std::max(out.max_abs_delta, std::abs(s - out.empirical_sigma));
  }
  return out;
}

}  // namespace qemlab
