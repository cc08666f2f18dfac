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

#include "qemlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "qemlab/io.hpp"
#include "qemlab/stats.hpp"

namespace qemlab {

using nlohmann::json;

double ansatz_energy(const PauliSum& h, std::span<const double> params, AnsatzForm form) {
  return expectation(h, simulate_statevector(build_ansatz(params, form)));
}

AnsatzParams parameter_shift_gradient(const PauliSum& h, std::span<const double> params,
                                      AnsatzForm form) {
  if (params.size() != 6) throw std::invalid_argument("the ansatz takes 6 angles");
  AnsatzParams g{};
  AnsatzParams shifted{};
  std::copy(params.begin(), params.end(), shifted.begin());
  constexpr double kShift = std::numbers::pi / 2;
  for (std::size_t i = 0; i < 6; ++i) {
    const double x = shifted[i];
    shifted[i] = x + kShift;
    const double up = ansatz_energy(h, shifted, form);
    shifted[i] = x - kShift;
    const double down = ansatz_energy(h, shifted, form);
    shifted[i] = x;
    g[i] = 0.5 * (up - down);
  }
  return g;
}

VqeResult vqe_train(const PauliSum& h, const AnsatzParams& init, const AdamConfig& config,
                    AnsatzForm form) {
  VqeResult r;
  r.params = init;
  AnsatzParams m{}, v{};
  double b1t = 1.0, b2t = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const double e = ansatz_energy(h, r.params, form);
    r.trace.push_back(e);
    if (config.target_energy && e <= *config.target_energy) {
      r.energy = e;
      r.converged = true;
      return r;
    }
    const auto g = parameter_shift_gradient(h, r.params, form);
    b1t *= config.beta1;
    b2t *= config.beta2;
    for (std::size_t i = 0; i < 6; ++i) {
      m[i] = config.beta1 * m[i] + (1 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1 - config.beta2) * g[i] * g[i];
      const double mh = m[i] / (1 - b1t);
      const double vh = v[i] / (1 - b2t);
      r.params[i] -= config.learning_rate * mh / (std::sqrt(vh) + config.epsilon);
    }
    ++r.iterations;
  }
  r.energy = ansatz_energy(h, r.params, form);
  r.trace.push_back(r.energy);
  if (config.target_energy) {
    r.converged = r.energy <= *config.target_energy;
  } else {
    const auto g = parameter_shift_gradient(h, r.params, form);
    r.converged = std::all_of(g.begin(), g.end(), [](double x) { return std::abs(x) < 1e-4; });
  }
  return r;
}

std::vector<GhzPoint> ghz_benchmark(const std::vector<int>& sizes, const NoiseModel& noise,
                                    std::uint64_t shots, std::uint64_t seed, bool with_mem,
                                    std::uint64_t calibration_shots) {
  noise.validate();
  std::vector<GhzPoint> out;
  for (int n : sizes) {
    if (n < 1 || n > kMaxGhzQubits) throw std::invalid_argument("GHZ size outside simulator limits");
    const Circuit c = build_ghz(n);
    const std::string tag = "ghz|" + std::to_string(n);
    MeasurementSet m;
    if (noise.t1_damping) {
      if (n > kMaxDensityQubits) throw std::invalid_argument("T1 damping needs the density engine (n <= 10)");
      m = run_density(c, noise, PauliString(n), shots, derive_seed(seed, tag));
    } else {
      m = run_trajectories(c, noise, shots, derive_seed(seed, tag));
    }
    GhzPoint p;
    p.n_qubits = n;
    p.cnots = c.two_qubit_count();
    p.f_raw = ghz_fidelity(m);
    p.f_mem = p.f_raw;
    if (with_mem) {
      const auto a = mem_build(run_calibration(noise, n, calibration_shots,
                                               derive_seed(seed, tag + "|calibration")));
      const Bits ones = (n == 64) ? ~Bits{0} : (Bits{1} << n) - 1;
      const double p0 = std::max(0.0, mem_quasi_probability(a, m, 0));
      const double p1 = std::max(0.0, mem_quasi_probability(a, m, ones));
      p.f_mem = ghz_fidelity(p0, p1);
    }
    out.push_back(p);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (!std::filesystem::exists(hamiltonian)) {
    throw std::invalid_argument("Hamiltonian file not found: " + hamiltonian.string());
  }
  noise.validate();
  if (strategies.empty()) throw std::invalid_argument("no strategies configured");
  for (const auto& s : strategies) Strategy::parse(s);
  if (budget == 0) throw std::invalid_argument("budget must be positive");
  if (!(prelim_fraction > 0.0 && prelim_fraction < 1.0)) {
    throw std::invalid_argument("prelim_fraction must lie in (0, 1)");
  }
  if (lambdas.empty()) throw std::invalid_argument("no noise factors configured");
  std::set<int> seen;
  for (int l : lambdas) {
    if (l < 1 || !seen.insert(l).second) throw std::invalid_argument("noise factors must be distinct and >= 1");
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds configured");
  if (resamples < 0 || resamples == 1) throw std::invalid_argument("resamples must be 0 or >= 2");
  if (calibration_shots == 0) throw std::invalid_argument("calibration_shots must be positive");
}

StrategyOptions ExperimentConfig::strategy_options() const {
  StrategyOptions o;
  o.lambdas = lambdas;
  o.fit = fit;
  o.tp_threshold = tp_threshold;
  o.calibration_shots = calibration_shots;
  return o;
}

PauliSum ExperimentConfig::load_hamiltonian() const { return load_pauli_sum(hamiltonian); }

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{
      "schema_version", "hamiltonian", "params",     "noise",          "strategies",
      "budget",         "prelim_fraction", "lambdas", "seeds",         "resamples",
      "bootstrap_seed", "fit",         "tp_threshold", "calibration_shots", "output_dir"};
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw std::invalid_argument("unknown config key: " + k);
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
  };
  ExperimentConfig c;
  c.hamiltonian = data_file("hcl_3q.json");
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != ExperimentConfig::kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version");
    }
    if (j.contains("hamiltonian")) c.hamiltonian = resolve(j.at("hamiltonian").get<std::string>());
    if (j.contains("params")) {
      const auto& p = j.at("params");
      if (p.is_string()) {
        if (p.get<std::string>() != "train") throw std::invalid_argument("params must be 6 angles or \"train\"");
        c.params.reset();
      } else {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != 6) throw std::invalid_argument("params must hold 6 angles");
        AnsatzParams a{};
        std::copy(v.begin(), v.end(), a.begin());
        c.params = a;
      }
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      if (n.is_string()) {
        c.noise_spec = n.get<std::string>();
        const auto resolved = resolve(c.noise_spec);
        c.noise = load_noise_model(std::filesystem::exists(resolved) ? resolved.string() : c.noise_spec);
      } else {
        c.noise = noise_model_from_json(n);
        c.noise_spec = c.noise.name;
      }
    }
    if (j.contains("strategies")) c.strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("budget")) c.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("prelim_fraction")) c.prelim_fraction = j.at("prelim_fraction").get<double>();
    if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<int>>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("resamples")) c.resamples = j.at("resamples").get<int>();
    if (j.contains("bootstrap_seed")) c.bootstrap_seed = j.at("bootstrap_seed").get<std::uint64_t>();
    if (j.contains("fit")) {
      const auto f = j.at("fit").get<std::string>();
      if (f == "WLS" || f == "wls") c.fit = FitMethod::WLS;
      else if (f == "OLS" || f == "ols") c.fit = FitMethod::OLS;
      else throw std::invalid_argument("fit must be WLS or OLS");
    }
    if (j.contains("tp_threshold")) c.tp_threshold = j.at("tp_threshold").get<double>();
    if (j.contains("calibration_shots")) c.calibration_shots = j.at("calibration_shots").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j = {{"schema_version", ExperimentConfig::kSchemaVersion},
            {"hamiltonian", c.hamiltonian.string()},
            {"noise", to_json(c.noise)},
            {"strategies", c.strategies},
            {"budget", c.budget},
            {"prelim_fraction", c.prelim_fraction},
            {"lambdas", c.lambdas},
            {"seeds", c.seeds},
            {"resamples", c.resamples},
            {"bootstrap_seed", c.bootstrap_seed},
            {"fit", std::string(fit_method_name(c.fit))},
            {"tp_threshold", c.tp_threshold},
            {"calibration_shots", c.calibration_shots}};
  if (c.params) {
    j["params"] = std::vector<double>(c.params->begin(), c.params->end());
  } else {
    j["params"] = "train";
  }
  if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.string();
  return j;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
  return experiment_config_from_json(j, path.parent_path());
}

namespace {

template <class F>
double mean_of(const std::vector<SeedRun>& runs, F f) {
  double s = 0.0;
  for (const auto& r : runs) s += f(r);
  return runs.empty() ? 0.0 : s / static_cast<double>(runs.size());
}

}  // namespace

double StrategyRow::bias() const { return mean_of(runs, [](const SeedRun& r) { return r.bias; }); }
double StrategyRow::sigma() const { return mean_of(runs, [](const SeedRun& r) { return r.sigma; }); }
double StrategyRow::mse() const {
  return mean_of(runs, [](const SeedRun& r) { return r.sigma * r.sigma + r.bias * r.bias; });
}
double StrategyRow::retention() const {
  return mean_of(runs, [](const SeedRun& r) { return r.retention; });
}

std::optional<double> StrategyRow::suppression() const {
  if (runs.empty()) return std::nullopt;
  for (const auto& r : runs) {
    if (!r.suppression) return std::nullopt;
  }
  return mean_of(runs, [](const SeedRun& r) { return *r.suppression; });
}

std::optional<double> StrategyRow::r_squared() const {
  if (runs.empty()) return std::nullopt;
  for (const auto& r : runs) {
    if (!r.r_squared) return std::nullopt;
  }
  return mean_of(runs, [](const SeedRun& r) { return *r.r_squared; });
}

int StrategyRow::positive_suppression_count() const {
  return static_cast<int>(std::count_if(runs.begin(), runs.end(), [](const SeedRun& r) {
    return r.suppression && *r.suppression > 0.0;
  }));
}

const StrategyRow* BenchmarkReport::find(const std::string& strategy) const {
  for (const auto& r : rows) {
    if (r.strategy == strategy) return &r;
  }
  return nullptr;
}

bool BenchmarkReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const StrategyRow& r) { return r.failed; });
}

namespace {

SeedRun run_one(const Strategy& s, const PauliSum& h, const Circuit& ansatz,
                const ExperimentConfig& cfg, std::uint64_t seed, double exact) {
  const auto opt = cfg.strategy_options();
  const ShotPlan plan = make_shot_plan(s, h, ansatz, cfg.noise, cfg.budget, cfg.prelim_fraction,
                                       derive_seed(seed, "plan"), opt);
  const StrategyData data = acquire_data(s, h, ansatz, cfg.noise, plan, seed, opt);
  const EstimatorResult res = estimate_from_data(data, h, opt);

  SeedRun run;
  run.seed = seed;
  run.energy = res.energy;
  run.bias = res.energy - exact;
  run.analytic_sigma = std::sqrt(res.variance);
  run.sigma = run.analytic_sigma;
  run.retention = res.mean_retention;
  run.shots = res.shots;
  if (res.zne) run.r_squared = res.zne->r_squared;

  if (cfg.resamples >= 2) {
    std::vector<ShotKey> keys;
    std::vector<MeasurementSet> sets;
    for (const auto& [k, m] : data.sets) {
      keys.push_back(k);
      sets.push_back(m);
    }
    StrategyData shell;
    shell.strategy = data.strategy;
    shell.plan = data.plan;
    shell.readout = data.readout;
    const SetEstimator est = [&](const std::vector<MeasurementSet>& rs) {
      StrategyData d = shell;
      for (std::size_t i = 0; i < keys.size(); ++i) d.sets.emplace(keys[i], rs[i]);
      return estimate_from_data(d, h, opt).energy;
    };
    const auto boot = bootstrap(sets, est, cfg.resamples,
                                derive_seed(cfg.bootstrap_seed, "seed|" + std::to_string(seed)));
    run.sigma = boot.sigma();
    run.bootstrap_estimates = boot.estimates;
  }
  return run;
}

}  // namespace

BenchmarkReport benchmark_matrix(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const PauliSum h = cfg.load_hamiltonian();
  BenchmarkReport report;
  report.exact_energy = ground_state(h).energy;
  if (cfg.params) {
    report.params = *cfg.params;
  } else {
    AdamConfig adam;
    adam.target_energy = report.exact_energy + kChemicalPrecision;
    report.params = vqe_train(h, AnsatzParams{kReferenceAnsatzParams}, adam).params;
  }
  report.reference_energy = ansatz_energy(h, report.params);
  const Circuit ansatz = build_ansatz(report.params, AnsatzForm::Native);

  report.rows.resize(cfg.strategies.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < cfg.strategies.size(); i = next++) {
      StrategyRow& row = report.rows[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Strategy s = Strategy::parse(cfg.strategies[i]);
        row.strategy = s.name();
        for (std::uint64_t seed : cfg.seeds) {
          row.runs.push_back(run_one(s, h, ansatz, cfg, seed, report.exact_energy));
        }
      } catch (const std::exception& e) {
        if (row.strategy.empty()) row.strategy = cfg.strategies[i];
        row.failed = true;
        row.reason = e.what();
        row.runs.clear();
      }
      row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n_threads = std::clamp(threads, 1, static_cast<int>(cfg.strategies.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (const StrategyRow* raw = report.find("RAW"); raw && !raw->failed) {
    const auto raw_runs = raw->runs;
    for (auto& row : report.rows) {
      for (std::size_t k = 0; k < row.runs.size(); ++k) {
        row.runs[k].suppression = error_suppression(row.runs[k].bias, raw_runs[k].bias);
      }
    }
  }
  return report;
}

namespace {

json optional_json(const std::optional<double>& v, double scale = 1.0) {
  return v ? json(*v * scale) : json(nullptr);
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string fmt(const std::optional<double>& v, const char* spec = "%.6f") {
  return v ? fmt(*v, spec) : std::string();
}

}  // namespace

json to_json(const BenchmarkReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = {{"strategy", row.strategy}, {"status", row.failed ? "failed" : "ok"}};
    if (row.failed) {
      jr["reason"] = row.reason;
      rows.push_back(jr);
      continue;
    }
    jr["bias_mha"] = row.bias() * 1e3;
    jr["sigma_mha"] = row.sigma() * 1e3;
    jr["mse_mha2"] = row.mse() * 1e6;
    jr["suppression_pct"] = optional_json(row.suppression());
    jr["positive_suppression_seeds"] = row.positive_suppression_count();
    jr["retention"] = row.retention();
    jr["r_squared"] = optional_json(row.r_squared());
    json runs = json::array();
    for (const auto& s : row.runs) {
      runs.push_back({{"seed", s.seed},
                      {"energy", s.energy},
                      {"bias_mha", s.bias * 1e3},
                      {"sigma_mha", s.sigma * 1e3},
                      {"analytic_sigma_mha", s.analytic_sigma * 1e3},
                      {"suppression_pct", optional_json(s.suppression)},
                      {"retention", s.retention},
                      {"r_squared", optional_json(s.r_squared)},
                      {"shots", s.shots}});
    }
    jr["runs"] = runs;
    rows.push_back(jr);
  }
  return {{"exact_energy", r.exact_energy},
          {"reference_energy", r.reference_energy},
          {"params", std::vector<double>(r.params.begin(), r.params.end())},
          {"strategies", rows}};
}

std::string to_csv(const BenchmarkReport& r) {
  std::ostringstream os;
  os << "strategy,status,bias_mha,sigma_mha,mse_mha2,suppression_pct,positive_seeds,retention,"
        "r_squared,reason\n";
  for (const auto& row : r.rows) {
    os << row.strategy << ',' << (row.failed ? "failed" : "ok") << ',';
    if (row.failed) {
      std::string reason = row.reason;
      std::replace(reason.begin(), reason.end(), '"', '\'');
      os << ",,,,,,,\"" << reason << "\"\n";
      continue;
    }
    const auto sup = row.suppression();
    os << fmt(row.bias() * 1e3) << ',' << fmt(row.sigma() * 1e3) << ',' << fmt(row.mse() * 1e6)
       << ',' << (sup ? fmt(*sup, "%.3f") : std::string()) << ',' << row.positive_suppression_count()
       << ',' << fmt(row.retention()) << ',' << fmt(row.r_squared()) << ",\n";
  }
  return os.str();
}

void write_benchmark_outputs(const BenchmarkReport& r, const ExperimentConfig& cfg,
                             const std::filesystem::path& dir, int histogram_bins) {
  write_json_file(dir / "config.json", to_json(cfg));
  write_json_file(dir / "results.json", to_json(r));
  write_text_file(dir / "results.csv", to_csv(r));
  json timing = json::object();
  for (const auto& row : r.rows) timing[row.strategy] = row.runtime_s;
  write_json_file(dir / "timing.json", timing);

  for (const auto& row : r.rows) {
    if (row.failed || row.runs.empty() || row.runs.front().bootstrap_estimates.empty()) continue;
    const auto& est = row.runs.front().bootstrap_estimates;
    const auto [lo_it, hi_it] = std::minmax_element(est.begin(), est.end());
    const double lo = (*lo_it - r.exact_energy) * 1e3;
    const double hi = (*hi_it - r.exact_energy) * 1e3;
    const double width = hi > lo ? (hi - lo) / histogram_bins : 1.0;
    std::vector<int> counts(static_cast<std::size_t>(histogram_bins), 0);
    for (double e : est) {
      const double x = (e - r.exact_energy) * 1e3;
      int b = static_cast<int>((x - lo) / width);
      counts[static_cast<std::size_t>(std::clamp(b, 0, histogram_bins - 1))]++;
    }
    std::ostringstream os;
    os << "bin_low_mha,bin_high_mha,count\n";
    for (int b = 0; b < histogram_bins; ++b) {
      os << fmt(lo + b * width) << ',' << fmt(lo + (b + 1) * width) << ','
         << counts[static_cast<std::size_t>(b)] << '\n';
    }
    std::string name = row.strategy;
    std::replace(name.begin(), name.end(), '+', '_');
    write_text_file(dir / "plotdata" / ("histogram_" + name + ".csv"), os.str());
  }
}

std::vector<ZneCurve> zne_report(const std::vector<ZneSeries>& series, int resamples,
                                 std::uint64_t seed, double grid_max, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<ZneCurve> out;
  for (const auto& s : series) {
    ZneCurve c;
    c.label = s.label;
    for (int i = 0; i < grid_points; ++i) c.grid.push_back(grid_max * i / (grid_points - 1));
    try {
      c.ols = zne_fit(s.points, FitMethod::OLS);
      c.wls = zne_fit(s.points, FitMethod::WLS);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    const ZneFit* line = c.wls ? &*c.wls : (c.ols ? &*c.ols : nullptr);
    if (line && resamples >= 2) {
      std::mt19937_64 rng(derive_seed(seed, "zne|" + s.label));
      std::vector<std::vector<double>> values(c.grid.size());
      for (int r = 0; r < resamples; ++r) {
        auto pts = s.points;
        for (auto& p : pts) {
          std::normal_distribution<double> noise(0.0, std::sqrt(std::max(p.variance, 0.0)));
          p.estimate += noise(rng);
        }
        const ZneFit f = zne_fit(pts, line->method);
        for (std::size_t g = 0; g < c.grid.size(); ++g) values[g].push_back(f.at(c.grid[g]));
      }
      int inside = 0;
      for (std::size_t g = 0; g < c.grid.size(); ++g) {
        auto& v = values[g];
        std::sort(v.begin(), v.end());
        auto q = [&](double f) {
          const double pos = f * static_cast<double>(v.size() - 1);
          const auto i = static_cast<std::size_t>(pos);
          const double frac = pos - static_cast<double>(i);
          return i + 1 < v.size() ? v[i] * (1 - frac) + v[i + 1] * frac : v[i];
        };
        c.band_low.push_back(q(0.025));
        c.band_high.push_back(q(0.975));
        const double y = line->at(c.grid[g]);
        if (y >= c.band_low.back() && y <= c.band_high.back()) ++inside;
      }
      c.band_coverage = static_cast<double>(inside) / static_cast<double>(c.grid.size());
    }
    out.push_back(std::move(c));
  }
  return out;
}

json to_json(const ZneCurve& c) {
  json j = {{"label", c.label}};
  if (c.wls) j["wls"] = to_json(*c.wls);
  if (c.ols) j["ols"] = to_json(*c.ols);
  if (!c.error.empty()) j["error"] = c.error;
  j["band_coverage"] = c.band_coverage;
  return j;
}

std::string zne_curve_csv(const ZneCurve& c) {
  std::ostringstream os;
  os << "lambda,wls,ols,band_low,band_high\n";
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    os << fmt(c.grid[g], "%.4f") << ',' << (c.wls ? fmt(c.wls->at(c.grid[g]), "%.9f") : "") << ','
       << (c.ols ? fmt(c.ols->at(c.grid[g]), "%.9f") : "") << ','
       << (g < c.band_low.size() ? fmt(c.band_low[g], "%.9f") : "") << ','
       << (g < c.band_high.size() ? fmt(c.band_high[g], "%.9f") : "") << '\n';
  }
  return os.str();
}

}  // namespace qemlab
