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

// Acceptance checks: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "qemlab/harness.hpp"
#include "qemlab/io.hpp"
#include "qemlab/stats.hpp"

using namespace qemlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, a, b, c, d);
  return buf;
}

const PauliSum& hamiltonian() {
  static const PauliSum h = load_hcl_hamiltonian();
  return h;
}

Outcome hamiltonian_fidelity() {
  const double e = ground_state(hamiltonian()).energy;
  const double dev = std::abs(e - (-455.157));
  return {dev <= 0.837e-3 + 0.5e-3, fmt("E_exact = %.9f Ha, |E - (-455.157)| = %.3f mHa", e, dev * 1e3)};
}

Outcome ansatz_expressibility() {
  const auto& h = hamiltonian();
  const double exact = ground_state(h).energy;
  const double ref = ansatz_energy(h, kReferenceAnsatzParams) - exact;
  AdamConfig cfg;
  cfg.target_energy = exact + kChemicalPrecision;
  int ok = 0, worst_it = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // Start at theta = 0 with 0.01 rad seeded jitter.
    AnsatzParams init{};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.01);
    for (auto& x : init) x = n(rng);
    const auto r = vqe_train(h, init, cfg);
    ok += r.converged && r.iterations <= 500;
    worst_it = std::max(worst_it, r.iterations);
    worst = std::max(worst, r.energy - exact);
  }
  return {ref <= kChemicalPrecision && ok == 5,
          fmt("reference angles %.3f mHa above E_exact; VQE from 0 converged %g/5, worst %.3f mHa after %g iterations",
              ref * 1e3, ok, worst * 1e3, worst_it)};
}

Outcome symmetry_checks() {
  const auto& h = hamiltonian();
  const auto j = read_json_file(data_file("hcl_tapering_generators.json"));
  std::vector<PauliString> gens;
  for (const auto& [name, s] : j.at("generators").items()) gens.push_back(PauliString::parse(s.get<std::string>()));
  bool gens_ok = gens.size() == 4;
  for (const auto& a : gens) {
    for (const auto& b : gens) gens_ok = gens_ok && commutes(a, b);
  }
  const auto c = SymmetryConstraint::hcl();
  bool ops_ok = true;
  for (const auto& op : c.operators()) ops_ok = ops_ok && commutes_with_sum(op.op, h);
  // Brute force over the dense diagonals.
  std::vector<Bits> brute;
  const auto sn = to_dense(c.operators()[0].op).matrix();
  const auto sz = to_dense(c.operators()[1].op).matrix();
  for (Bits b = 0; b < 8; ++b) {
    if (std::abs(sn(b, b).real() - 18.0) < 1e-9 && std::abs(sz(b, b).real()) < 1e-9) brute.push_back(b);
  }
  std::vector<Bits> expect;
  for (const char* s : {"001", "011", "101", "110", "111"}) expect.push_back(parse_bits(s));
  const bool set_ok = brute == expect && c.allowed_states() == expect;
  return {gens_ok && ops_ok && set_ok,
          std::string("generators commute: ") + (gens_ok ? "yes" : "no") + ", S_N/S_z commute with H: " +
              (ops_ok ? "yes" : "no") + ", allowed set {001,011,101,110,111}: " + (set_ok ? "yes" : "no")};
}

Outcome dsp_algebra() {
  const auto& h = hamiltonian();
  const auto ansatz = build_ansatz(kReferenceAnsatzParams, AnsatzForm::Native);
  const auto psi = simulate_statevector(ansatz);
  const Strategy s = Strategy::parse("DSP");
  const StrategyOptions opt;
  constexpr std::uint64_t kShots = 10000;
  int value_ok = 0, retention_ok = 0, y_ok = 0, n = 0;
  double worst_z = 0.0, min_retention = 1.0;
  for (const auto& t : h.non_identity_terms()) {
    ++n;
    std::map<char, QuasiDistribution> d;
    for (char b : {'X', 'Y', 'Z'}) {
      const auto pc = prepare_circuit(s, ansatz, {t.string, 1, b}, opt, NoiseModel::ideal());
      d[b] = QuasiDistribution::from(run_density(pc.circuit, NoiseModel::ideal(), pc.basis, kShots,
                                                 derive_seed(2024, t.string.str() + b)));
    }
    const auto e = dsp_estimate(d['X'], d['Z']);
    const double direct = expectation(PauliSum::from_pairs(3, {{t.string.str(), 1.0}}), psi);
    const double sigma = std::sqrt(e.variance);
    const double z = std::abs(e.value - direct) / std::max(sigma, 1e-12);
    worst_z = std::max(worst_z, z);
    value_ok += z <= 4.0;
    const auto rz = ancilla_readout(d['Z']);
    min_retention = std::min(min_retention, rz.retention);
    retention_ok += rz.retention >= 0.5 - 4 * std::sqrt(0.25 / kShots);
    const auto ry = ancilla_readout(d['Y']);
    y_ok += std::abs(ry.expectation) < 4 / std::sqrt(ry.retained_shots);
  }
  return {value_ok == n && retention_ok == n && y_ok == n,
          fmt("%g/33 terms within 4 sigma (worst %.2f sigma), min retention %.3f, |<Y>| < 4 sigma on %g/33",
              value_ok, worst_z, min_retention, y_ok)};
}

Outcome mem_exactness() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> flips;
  for (int k = 0; k < 6; ++k) flips.push_back(0.2 * u(rng));
  const AssignmentMatrix a(flips);
  std::vector<double> ideal(64);
  double sum = 0.0;
  for (auto& x : ideal) sum += (x = u(rng));
  for (auto& x : ideal) x /= sum;
  const auto noisy = apply_readout_flips(ideal, 6, flips);
  const auto back = mem_apply(a, noisy);
  QuasiDistribution q;
  q.n_bits = 6;
  q.shots = 1;
  for (Bits b = 0; b < 64; ++b) q.weights[b] = noisy[b];
  const auto sparse = mem_apply(a, q);
  double err = 0.0;
  for (Bits b = 0; b < 64; ++b) {
    err = std::max(err, std::abs(back[b] - ideal[b]));
    err = std::max(err, std::abs(sparse.weights.at(b) - ideal[b]));
  }
  const auto ghz = ghz_benchmark({21}, NoiseModel::falcon_like(), 100000, 21).front();
  return {err < 1e-10 && ghz.f_mem > ghz.f_raw,
          fmt("max inversion error %.2e; 21-qubit GHZ f_raw %.3f -> f_mem %.3f", err, ghz.f_raw, ghz.f_mem)};
}

Outcome zne_recovery() {
  const auto& h = hamiltonian();
  NoiseModel noise = NoiseModel::falcon_like();
  noise.name = "depolarizing";
  noise.readout_flip = {0.0};
  const double truth = ansatz_energy(h, kReferenceAnsatzParams);
  constexpr std::uint64_t kBudget = 10000000;
  int ok = 0;
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto raw = run_strategy(Strategy::parse("RAW"), h, kReferenceAnsatzParams, noise, kBudget, 0.001, seed);
    const auto zne = run_strategy(Strategy::parse("ZNE"), h, kReferenceAnsatzParams, noise, kBudget, 0.001, seed);
    const double ratio = std::abs(zne.energy - truth) / std::abs(raw.energy - truth);
    worst_ratio = std::max(worst_ratio, ratio);
    ok += ratio <= 0.5;
  }
  return {ok == 5, fmt("WLS |bias| / RAW |bias| <= 0.5 on %g/5 seeds (worst ratio %.3f), depolarizing only, B = 1e7",
                       ok, worst_ratio)};
}

Outcome bootstrap_validity() {
  const auto& h = hamiltonian();
  const auto ansatz = build_ansatz(kReferenceAnsatzParams, AnsatzForm::Native);
  std::vector<PauliTerm> diagonal;
  for (const auto& t : h.non_identity_terms()) {
    if (t.string.is_diagonal()) diagonal.push_back(t);
  }
  const SetEstimator est = [&](const std::vector<MeasurementSet>& sets) {
    double e = h.identity_coeff();
    for (const auto& t : diagonal) e += t.coeff * raw_estimate(sets[0], t.string).value;
    return e;
  };
  std::vector<std::vector<MeasurementSet>> experiments;
  for (int i = 0; i < 120; ++i) {
    experiments.push_back({run_density(ansatz, NoiseModel::falcon_like(), PauliString(3), 10000,
                                       derive_seed(31, "appendix|" + std::to_string(i)))});
  }
  const auto a = sigma_agreement(experiments, est, 1000, 5);
  int normal = 0;
  for (double p : a.normality_p) normal += p > 0.01;
  const double frac = static_cast<double>(normal) / static_cast<double>(a.normality_p.size());
  return {a.max_abs_delta < 2e-3 && frac >= 0.9,
          fmt("120 experiments x 1e4 shots: empirical sigma %.3f mHa, max |delta| %.3f mHa, normal %.0f%%",
              a.empirical_sigma * 1e3, a.max_abs_delta * 1e3, frac * 100)};
}

Outcome benchmark_matrix_check() {
  ExperimentConfig cfg;
  cfg.hamiltonian = data_file("hcl_3q.json");
  const auto r = benchmark_matrix(cfg, 1);
  const auto* raw = r.find("RAW");
  const auto* memsv = r.find("MEM+SV");
  const auto* tp = r.find("DSP+TP");
  if (!raw || !memsv || !tp || r.any_failed() || r.rows.size() != 16) {
    return {false, "benchmark incomplete or a strategy failed"};
  }
  const double raw_sigma = raw->sigma() * 1e3;
  const bool sigma_ok = raw_sigma >= 1.0 && raw_sigma <= 5.0;
  const bool sup_ok = memsv->positive_suppression_count() == 5 && tp->positive_suppression_count() == 5;
  const bool reduce_ok = memsv->sigma() < raw->sigma();
  return {sigma_ok && sup_ok && reduce_ok,
          fmt("RAW sigma %.3f mHa; positive suppression MEM+SV %g/5, DSP+TP %g/5; MEM+SV sigma %.3f mHa",
              raw_sigma, memsv->positive_suppression_count(), tp->positive_suppression_count(),
              memsv->sigma() * 1e3)};
}

Outcome strategy_validation() {
  int ok = 0;
  for (const auto& n : benchmark_strategy_names()) {
    if (n == "RAW") continue;
    try {
      ok += Strategy::parse(n).name() == n;
    } catch (const std::exception&) {
    }
  }
  auto rejected = [](const char* s) {
    try {
      Strategy::parse(s);
      return false;
    } catch (const std::invalid_argument&) {
      return true;
    }
  };
  const bool rej = rejected("SV+DSP") && rejected("TP");
  return {ok == 15 && rej, fmt("%g/15 strategy names valid; SV+DSP and TP rejected: ", ok) + (rej ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Hamiltonian fidelity", 1, hamiltonian_fidelity},
      {2, "Ansatz expressibility", 60, ansatz_expressibility},
      {3, "Symmetry checks", 1, symmetry_checks},
      {4, "DSP algebra", 120, dsp_algebra},
      {5, "MEM exactness", 0, mem_exactness},
      {6, "ZNE recovery", 600, zne_recovery},
      {7, "Bootstrap validity", 600, bootstrap_validity},
      {8, "Benchmark matrix", 1800, benchmark_matrix_check},
      {9, "Strategy validation", 0, strategy_validation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += fmt(" [runtime limit %.0f s exceeded]", c.limit_s);
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
