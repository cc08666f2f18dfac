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

// qemlab command-line driver.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qemlab/harness.hpp"
#include "qemlab/io.hpp"

using namespace qemlab;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "qemlab_out";
};

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

int cmd_vqe(const Globals& g, const std::string& init, const std::string& form_name,
            int iterations, double lr, double jitter, const std::string& dump_circuit) {
  const PauliSum h = load_hcl_hamiltonian();
  const double exact = ground_state(h).energy;
  AnsatzForm form;
  if (form_name == "native") form = AnsatzForm::Native;
  else if (form_name == "ry") form = AnsatzForm::RyGates;
  else throw std::invalid_argument("--form must be native or ry");
  AnsatzParams p{};
  if (init == "reference") p = AnsatzParams{kReferenceAnsatzParams};
  else if (init != "zero") throw std::invalid_argument("--init must be zero or reference");
  if (jitter > 0) {
    std::mt19937_64 rng(g.seed);
    std::normal_distribution<double> n(0.0, jitter);
    for (auto& x : p) x += n(rng);
  }
  AdamConfig cfg;
  cfg.max_iterations = iterations;
  cfg.learning_rate = lr;
  cfg.target_energy = exact + kChemicalPrecision;
  const VqeResult r = vqe_train(h, p, cfg, form);

  std::ostringstream trace;
  trace << "iteration,energy,error_mha\n";
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    trace << i << ',' << csv_double(r.trace[i]) << ',' << csv_double((r.trace[i] - exact) * 1e3) << '\n';
  }
  const std::filesystem::path dir(g.out);
  write_text_file(dir / "plotdata" / "vqe_trace.csv", trace.str());
  write_json_file(dir / "vqe.json", {{"params", std::vector<double>(r.params.begin(), r.params.end())},
                                     {"energy", r.energy},
                                     {"exact_energy", exact},
                                     {"error_mha", (r.energy - exact) * 1e3},
                                     {"iterations", r.iterations},
                                     {"converged", r.converged}});
  if (!dump_circuit.empty()) write_json_file(dump_circuit, to_json(build_ansatz(r.params, form)));
  std::printf("iterations %d  energy %.9f  error %.3f mHa  %s\n", r.iterations, r.energy,
              (r.energy - exact) * 1e3, r.converged ? "converged" : "NOT converged");
  return 0;
}

int cmd_ghz(const Globals& g, int min_n, int max_n, const std::string& noise_spec,
            std::uint64_t shots, bool no_mem) {
  if (min_n < 1 || max_n < min_n) throw std::invalid_argument("bad GHZ size range");
  const NoiseModel noise = load_noise_model(noise_spec);
  std::vector<int> sizes;
  for (int n = min_n; n <= max_n; ++n) sizes.push_back(n);
  const auto pts = ghz_benchmark(sizes, noise, shots, g.seed, !no_mem);
  std::ostringstream csv;
  csv << "n_qubits,cnots,f_raw,f_mem\n";
  json rows = json::array();
  std::printf("%4s %6s %9s %9s\n", "N", "CNOTs", "f_raw", "f_mem");
  for (const auto& p : pts) {
    csv << p.n_qubits << ',' << p.cnots << ',' << csv_double(p.f_raw) << ',' << csv_double(p.f_mem) << '\n';
    rows.push_back({{"n_qubits", p.n_qubits}, {"cnots", p.cnots}, {"f_raw", p.f_raw}, {"f_mem", p.f_mem}});
    std::printf("%4d %6zu %9.4f %9.4f\n", p.n_qubits, p.cnots, p.f_raw, p.f_mem);
  }
  const std::filesystem::path dir(g.out);
  write_text_file(dir / "plotdata" / "ghz_fidelity.csv", csv.str());
  write_json_file(dir / "ghz.json", {{"noise", to_json(noise)}, {"shots", shots}, {"seed", g.seed}, {"points", rows}});
  return 0;
}

struct BenchOverrides {
  std::string config;
  std::string noise;
  std::uint64_t budget = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> strategies;
  int resamples = -1;
  std::uint64_t bootstrap_seed = 0;
  bool bootstrap_seed_set = false;
};

ExperimentConfig make_config(const BenchOverrides& o) {
  json j = o.config.empty() ? json::object() : read_json_file(o.config);
  if (!o.noise.empty()) j["noise"] = o.noise;
  if (o.budget) j["budget"] = o.budget;
  if (!o.seeds.empty()) j["seeds"] = o.seeds;
  if (!o.strategies.empty()) j["strategies"] = o.strategies;
  if (o.resamples >= 0) j["resamples"] = o.resamples;
  if (o.bootstrap_seed_set) j["bootstrap_seed"] = o.bootstrap_seed;
  const auto base = o.config.empty() ? std::filesystem::path{} : std::filesystem::path(o.config).parent_path();
  return experiment_config_from_json(j, base);
}

int cmd_bench(const Globals& g, const BenchOverrides& o) {
  const ExperimentConfig cfg = make_config(o);
  const auto report = benchmark_matrix(cfg, g.threads);
  const std::filesystem::path dir = cfg.output_dir.empty() ? std::filesystem::path(g.out) : cfg.output_dir;
  write_benchmark_outputs(report, cfg, dir);
  std::printf("E_exact %.9f  reference %.9f\n", report.exact_energy, report.reference_energy);
  std::printf("%-16s %10s %9s %10s %8s %9s\n", "strategy", "bias mHa", "sigma mHa", "supp %", "retain", "runtime");
  for (const auto& row : report.rows) {
    if (row.failed) {
      std::printf("%-16s FAILED: %s\n", row.strategy.c_str(), row.reason.c_str());
      continue;
    }
    const auto sup = row.suppression();
    std::printf("%-16s %10.3f %9.3f %10s %8.3f %8.1fs\n", row.strategy.c_str(), row.bias() * 1e3,
                row.sigma() * 1e3, sup ? csv_double(*sup).substr(0, 8).c_str() : "-", row.retention(),
                row.runtime_s);
  }
  std::printf("outputs in %s\n", dir.string().c_str());
  return report.any_failed() ? kExitPartial : 0;
}

int cmd_zne(const Globals& g, const BenchOverrides& o, const std::string& strategy,
            const std::vector<double>& scales) {
  const ExperimentConfig cfg = make_config(o);
  const Strategy s = Strategy::parse(strategy);
  if (!s.has(Technique::ZNE)) throw std::invalid_argument("--strategy must include ZNE");
  const PauliSum h = cfg.load_hamiltonian();
  const AnsatzParams params = cfg.params.value_or(AnsatzParams{kReferenceAnsatzParams});
  std::vector<ZneSeries> series;
  bool failed = false;
  json failures = json::array();
  for (double scale : scales) {
    NoiseModel n = cfg.noise;
    n.p_dep_1q *= scale;
    n.p_dep_2q *= scale;
    char label[32];
    std::snprintf(label, sizeof label, "x%.2f", scale);
    try {
      const auto r = run_strategy(s, h, params, n, cfg.budget, cfg.prelim_fraction, g.seed,
                                  cfg.strategy_options());
      series.push_back({label, r.zne_points});
    } catch (const std::exception& e) {
      failed = true;
      failures.push_back({{"label", label}, {"reason", e.what()}});
    }
  }
  const auto curves = zne_report(series, std::max(cfg.resamples, 2), cfg.bootstrap_seed);
  const std::filesystem::path dir(g.out);
  json out = {{"strategy", s.name()}, {"exact_energy", ground_state(h).energy}, {"curves", json::array()},
              {"failures", failures}};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    out["curves"].push_back(to_json(curves[i]));
    write_text_file(dir / "plotdata" / ("zne_fit_" + curves[i].label + ".csv"), zne_curve_csv(curves[i]));
    std::ostringstream pts;
    pts << "lambda,estimate,variance\n";
    for (const auto& p : series[i].points) pts << p.lambda << ',' << csv_double(p.estimate) << ',' << p.variance << '\n';
    write_text_file(dir / "plotdata" / ("zne_points_" + curves[i].label + ".csv"), pts.str());
    if (curves[i].wls && curves[i].ols) {
      std::printf("%s  WLS E0 %.6f (R2 %.4f, se %.2e)  OLS E0 %.6f (R2 %.4f, se %.2e)\n",
                  curves[i].label.c_str(), curves[i].wls->intercept, curves[i].wls->r_squared,
                  curves[i].wls->stderr_intercept, curves[i].ols->intercept, curves[i].ols->r_squared,
                  curves[i].ols->stderr_intercept);
    } else {
      failed = true;
      std::printf("%s  fit failed: %s\n", curves[i].label.c_str(), curves[i].error.c_str());
    }
  }
  write_json_file(dir / "zne_report.json", out);
  return failed ? kExitPartial : 0;
}

int cmd_validate(const std::vector<std::string>& names) {
  int rc = 0;
  for (const auto& n : names) {
    try {
      std::printf("%-20s OK  %s\n", n.c_str(), Strategy::parse(n).name().c_str());
    } catch (const std::invalid_argument& e) {
      std::printf("%-20s REJECTED  %s\n", n.c_str(), e.what());
      rc = kExitConfig;
    }
  }
  return rc;
}

int cmd_dump(const std::string& path, bool as_json) {
  const PauliSum h = path.empty() ? load_hcl_hamiltonian() : load_pauli_sum(path);
  if (as_json) {
    std::cout << to_json(h).dump(2) << '\n';
    return 0;
  }
  std::printf("%d qubits, %zu terms\n", h.n_qubits(), h.terms().size());
  for (const auto& t : h.terms()) std::printf("  %s  %+.9f\n", t.string.str().c_str(), t.coeff);
  std::printf("E_exact %.12f\n", ground_state(h).energy);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qemlab: quantum error mitigation benchmarks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Root seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  auto* vqe = app.add_subcommand("vqe", "Train the ansatz (noiseless statevector, Adam)");
  std::string init = "zero", form = "native", dump_circuit;
  int iterations = 500;
  double lr = 0.05, jitter = 0.0;
  vqe->add_option("--init", init, "zero | reference")->capture_default_str();
  vqe->add_option("--form", form, "native | ry")->capture_default_str();
  vqe->add_option("--iterations", iterations)->capture_default_str();
  vqe->add_option("--lr", lr)->capture_default_str();
  vqe->add_option("--jitter", jitter, "Gaussian jitter of the initial angles (uses --seed)");
  vqe->add_option("--dump-circuit", dump_circuit, "Write the trained circuit as JSON");

  auto* ghz = app.add_subcommand("ghz", "GHZ fidelity against register size");
  int min_n = 2, max_n = 10;
  std::string ghz_noise = "falcon-like";
  std::uint64_t ghz_shots = 100000;
  bool no_mem = false;
  ghz->add_option("--min", min_n)->capture_default_str();
  ghz->add_option("--max", max_n)->capture_default_str();
  ghz->add_option("--noise", ghz_noise, "Preset name or JSON file")->capture_default_str();
  ghz->add_option("--shots", ghz_shots)->capture_default_str();
  ghz->add_flag("--no-mem", no_mem);

  BenchOverrides o;
  auto add_bench_options = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config JSON");
    sub->add_option("--noise", o.noise, "Preset name or JSON file");
    sub->add_option("--budget", o.budget, "Shot budget B");
    sub->add_option("--seeds", o.seeds)->delimiter(',');
    sub->add_option("--strategies", o.strategies)->delimiter(',');
    sub->add_option("--resamples", o.resamples, "Bootstrap resamples (0 disables)");
    sub->add_option("--bootstrap-seed", o.bootstrap_seed)->each([&](const std::string&) { o.bootstrap_seed_set = true; });
  };
  auto* bench = app.add_subcommand("bench", "Strategy benchmark matrix");
  add_bench_options(bench);

  auto* zne = app.add_subcommand("zne", "ZNE fits (WLS and OLS) per noise scale");
  add_bench_options(zne);
  std::string zne_strategy = "ZNE";
  std::vector<double> scales{1.0};
  zne->add_option("--strategy", zne_strategy)->capture_default_str();
  zne->add_option("--noise-scales", scales, "Multipliers of the gate error rates")->delimiter(',');

  auto* validate = app.add_subcommand("validate-strategy", "Parse and validate strategy names");
  std::vector<std::string> names;
  validate->add_option("names", names)->required();

  auto* dump = app.add_subcommand("dump-hamiltonian", "Print the Hamiltonian and its ground energy");
  std::string ham_path;
  bool as_json = false;
  dump->add_option("--file", ham_path, "Hamiltonian JSON (default: shipped)");
  dump->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*vqe) return cmd_vqe(g, init, form, iterations, lr, jitter, dump_circuit);
    if (*ghz) return cmd_ghz(g, min_n, max_n, ghz_noise, ghz_shots, no_mem);
    if (*bench) return cmd_bench(g, o);
    if (*zne) return cmd_zne(g, o, zne_strategy, scales);
    if (*validate) return cmd_validate(names);
    if (*dump) return cmd_dump(ham_path, as_json);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
