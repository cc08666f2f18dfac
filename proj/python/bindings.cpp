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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qemlab/harness.hpp"
#include "qemlab/io.hpp"

namespace py = pybind11;
using namespace qemlab;

namespace {

AnsatzParams to_params(const std::optional<std::vector<double>>& p) {
  if (!p) return AnsatzParams{kReferenceAnsatzParams};
  if (p->size() != 6) throw std::invalid_argument("the ansatz takes 6 angles");
  AnsatzParams a{};
  std::copy(p->begin(), p->end(), a.begin());
  return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qemlab core bindings";
  py::register_exception<EmptyPostSelection>(m, "EmptyPostSelection", PyExc_RuntimeError);

  py::class_<PauliString>(m, "PauliString")
      .def(py::init(&PauliString::parse))
      .def("__str__", &PauliString::str)
      .def("__repr__", [](const PauliString& p) { return "PauliString('" + p.str() + "')"; })
      .def_property_readonly("n_qubits", &PauliString::n_qubits)
      .def("support", &PauliString::support)
      .def("is_diagonal", &PauliString::is_diagonal)
      .def("commutes", [](const PauliString& a, const PauliString& b) { return commutes(a, b); });

  py::class_<PauliSum>(m, "PauliSum")
      .def_property_readonly("n_qubits", &PauliSum::n_qubits)
      .def("terms", [](const PauliSum& s) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& t : s.terms()) out.emplace_back(t.string.str(), t.coeff);
        return out;
      })
      .def("ground_energy", [](const PauliSum& s) { return ground_state(s).energy; });

  m.def("pauli_sum", [](int n, const std::vector<std::pair<std::string, double>>& terms) {
    return PauliSum::from_pairs(n, terms);
  });
  m.def("load_hamiltonian", [](const std::optional<std::string>& path) {
    return path ? load_pauli_sum(*path) : load_hcl_hamiltonian();
  }, py::arg("path") = py::none());
  m.def("reference_params", []() {
    return std::vector<double>(kReferenceAnsatzParams.begin(), kReferenceAnsatzParams.end());
  });
  m.def("ansatz_energy", [](const PauliSum& h, const std::vector<double>& p) {
    return ansatz_energy(h, to_params(p));
  });

  m.def("parse_strategy", [](const std::string& s) { return Strategy::parse(s).name(); },
        "Canonical name of a strategy; raises ValueError when invalid.");
  m.def("benchmark_strategy_names", &benchmark_strategy_names);

  m.def("dsp_combine", &dsp_combine);
  m.def("dsp_z_only", &dsp_z_only);
  m.def("tomography_purify", [](double gx, double gy, double gz, double threshold) {
    return tomography_purify({gx, gy, gz}, threshold).value;
  }, py::arg("gx"), py::arg("gy"), py::arg("gz"), py::arg("threshold") = kDefaultTpThreshold);
  m.def("mem_apply", [](const std::vector<double>& flips, const std::vector<double>& probs) {
    return mem_apply(AssignmentMatrix(flips), probs);
  });
  m.def("_zne_fit", [](const std::vector<std::tuple<int, double, double>>& pts, const std::string& method) {
    std::vector<ZnePoint> p;
    for (const auto& [l, e, v] : pts) p.push_back({l, e, v});
    const FitMethod fm = method == "OLS" ? FitMethod::OLS : FitMethod::WLS;
    return to_json(zne_fit(p, fm)).dump();
  });

  m.def("_run_strategy", [](const std::string& strategy, const std::optional<std::vector<double>>& params,
                            const std::string& noise, std::uint64_t budget, double prelim_fraction,
                            std::uint64_t seed) {
    const auto h = load_hcl_hamiltonian();
    const auto r = run_strategy(Strategy::parse(strategy), h, to_params(params), load_noise_model(noise),
                                budget, prelim_fraction, seed);
    return to_json(r).dump();
  });
  m.def("_vqe_train", [](const std::vector<double>& init, int max_iterations, double lr) {
    const auto h = load_hcl_hamiltonian();
    AdamConfig c;
    c.max_iterations = max_iterations;
    c.learning_rate = lr;
    c.target_energy = ground_state(h).energy + kChemicalPrecision;
    const auto r = vqe_train(h, to_params(init), c);
    nlohmann::json j = {{"params", std::vector<double>(r.params.begin(), r.params.end())},
                        {"energy", r.energy}, {"trace", r.trace},
                        {"iterations", r.iterations}, {"converged", r.converged}};
    return j.dump();
  });
  m.def("_ghz_benchmark", [](const std::vector<int>& sizes, const std::string& noise, std::uint64_t shots,
                             std::uint64_t seed, bool with_mem) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : ghz_benchmark(sizes, load_noise_model(noise), shots, seed, with_mem)) {
      out.push_back({{"n_qubits", p.n_qubits}, {"cnots", p.cnots}, {"f_raw", p.f_raw}, {"f_mem", p.f_mem}});
    }
    return out.dump();
  });
  m.def("_benchmark", [](const std::string& config_json, int threads) {
    const auto cfg = experiment_config_from_json(nlohmann::json::parse(config_json));
    py::gil_scoped_release release;
    return to_json(benchmark_matrix(cfg, threads)).dump();
  });
}
