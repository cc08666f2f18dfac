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

#include "qemlab/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qemlab {

PauliSum pauli_sum_from_json(const Json& j) {
  const int n = j.at("n_qubits").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    PauliString s = PauliString::parse(t.at("pauli").get<std::string>());
    if (s.n_qubits() != n) throw std::invalid_argument("term length does not match n_qubits");
    terms.push_back({t.at("coeff").get<double>(), s});
  }
  return PauliSum(n, std::move(terms));
}

Json to_json(const PauliSum& p) {
  Json terms = Json::array();
  for (const auto& t : p.terms()) terms.push_back({{"pauli", t.string.str()}, {"coeff", t.coeff}});
  return {{"n_qubits", p.n_qubits()}, {"terms", terms}};
}

PauliSum load_pauli_sum(const std::filesystem::path& path) {
  return pauli_sum_from_json(read_json_file(path));
}

std::filesystem::path data_file(const std::string& name) {
  if (const char* env = std::getenv("QEMLAB_DATA_DIR")) return std::filesystem::path(env) / name;
  return std::filesystem::path(QEMLAB_DATA_DIR) / name;
}

PauliSum load_hcl_hamiltonian() { return load_pauli_sum(data_file("hcl_3q.json")); }

NoiseModel noise_model_from_json(const Json& j) {
  NoiseModel m;
  if (j.contains("preset")) m = NoiseModel::by_name(j.at("preset").get<std::string>());
  m.name = j.value("name", m.name);
  m.p_dep_1q = j.value("p_dep_1q", m.p_dep_1q);
  m.p_dep_2q = j.value("p_dep_2q", m.p_dep_2q);
  if (j.contains("readout_flip")) {
    const auto& r = j.at("readout_flip");
    m.readout_flip = r.is_array() ? r.get<std::vector<double>>()
                                  : std::vector<double>{r.get<double>()};
  }
  if (j.contains("t1_damping") && !j.at("t1_damping").is_null()) {
    const auto& t = j.at("t1_damping");
    T1Damping d;
    d.t1_us = t.value("t1_us", d.t1_us);
    d.gate_1q_ns = t.value("gate_1q_ns", d.gate_1q_ns);
    d.gate_2q_ns = t.value("gate_2q_ns", d.gate_2q_ns);
    d.readout_ns = t.value("readout_ns", d.readout_ns);
    m.t1_damping = d;
  }
  m.validate();
  return m;
}

Json to_json(const NoiseModel& m) {
  Json j = {{"name", m.name},
            {"p_dep_1q", m.p_dep_1q},
            {"p_dep_2q", m.p_dep_2q},
            {"readout_flip", m.readout_flip}};
  if (m.t1_damping) {
    const auto& d = *m.t1_damping;
    j["t1_damping"] = {{"t1_us", d.t1_us},
                       {"gate_1q_ns", d.gate_1q_ns},
                       {"gate_2q_ns", d.gate_2q_ns},
                       {"readout_ns", d.readout_ns}};
  } else {
    j["t1_damping"] = nullptr;
  }
  return j;
}

NoiseModel load_noise_model(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) {
    return noise_model_from_json(read_json_file(name_or_path));
  }
  return NoiseModel::by_name(name_or_path);
}

Json to_json(const MeasurementSet& m) {
  Json counts = Json::object();
  for (const auto& [b, c] : m.counts()) counts[bits_to_string(b, m.n_qubits())] = c;
  return {{"n_qubits", m.n_qubits()}, {"shots", m.shots()}, {"counts", counts}};
}

MeasurementSet measurement_set_from_json(const Json& j) {
  const auto& counts = j.at("counts");
  int n = j.value("n_qubits", 0);
  if (n == 0) {
    if (counts.empty()) throw std::invalid_argument("cannot infer register size");
    n = static_cast<int>(counts.begin().key().size());
  }
  MeasurementSet m(n);
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (static_cast<int>(it.key().size()) != n) throw std::invalid_argument("bitstring length");
    m.add(parse_bits(it.key()), it.value().get<std::uint64_t>());
  }
  if (j.contains("shots") && j.at("shots").get<std::uint64_t>() != m.shots()) {
    throw std::invalid_argument("shots does not equal the sum of counts");
  }
  return m;
}

std::string to_csv(const MeasurementSet& m) {
  std::ostringstream out;
  out << "bitstring,count\n";
  for (const auto& [b, c] : m.counts()) out << bits_to_string(b, m.n_qubits()) << ',' << c << '\n';
  return out.str();
}

Json to_json(const Circuit& c) {
  Json gates = Json::array();
  for (const auto& g : c.gates()) {
    Json jg = {{"kind", std::string(gate_name(g.kind))}};
    Json qs = Json::array();
    for (int k = 0; k < g.arity(); ++k) qs.push_back(g.qubits[static_cast<std::size_t>(k)]);
    jg["qubits"] = qs;
    if (gate_has_angle(g.kind)) jg["angle"] = g.angle;
    gates.push_back(jg);
  }
  return {{"n_qubits", c.n_qubits()}, {"measured", c.measured_qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const Json& j) {
  Circuit c(j.at("n_qubits").get<int>());
  for (const auto& jg : j.at("gates")) {
    const GateKind kind = parse_gate_kind(jg.at("kind").get<std::string>());
    const auto qs = jg.value("qubits", std::vector<int>{});
    const double angle = jg.value("angle", 0.0);
    if (gate_arity(kind) == 0) {
      c.barrier();
    } else if (gate_arity(kind) == 1) {
      if (qs.size() != 1) throw std::invalid_argument("gate arity mismatch");
      c.add(Gate::one(kind, qs[0], angle));
    } else {
      if (qs.size() != 2) throw std::invalid_argument("gate arity mismatch");
      c.add(Gate::two(kind, qs[0], qs[1], angle));
    }
  }
  if (j.contains("measured")) c.set_measured_qubits(j.at("measured").get<std::vector<int>>());
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace qemlab
