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

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qemlab/circuit.hpp"
#include "qemlab/noisy_sim.hpp"
#include "qemlab/pauli.hpp"

namespace qemlab {

using Json = nlohmann::json;

/// {"n_qubits": 3, "terms": [{"pauli": "XYZ", "coeff": 0.5}, ...]}
PauliSum pauli_sum_from_json(const Json& j);
Json to_json(const PauliSum& p);
PauliSum load_pauli_sum(const std::filesystem::path& path);

/// Path of a file shipped in the data directory.
std::filesystem::path data_file(const std::string& name);

/// The shipped 3-qubit Hamiltonian.
PauliSum load_hcl_hamiltonian();

NoiseModel noise_model_from_json(const Json& j);
Json to_json(const NoiseModel& m);
/// A preset name ("ideal", "falcon-like") or a JSON file path.
NoiseModel load_noise_model(const std::string& name_or_path);

/// {"n_qubits": n, "shots": s, "counts": {"0101": c, ...}}; bitstring
/// character k is measured qubit k.
Json to_json(const MeasurementSet& m);
MeasurementSet measurement_set_from_json(const Json& j);
std::string to_csv(const MeasurementSet& m);

/// {"n_qubits": n, "measured": [...], "gates": [{"kind", "qubits", "angle"?}]}
Json to_json(const Circuit& c);
Circuit circuit_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
/// Writes with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qemlab
