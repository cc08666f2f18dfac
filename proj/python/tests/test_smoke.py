# Copyright 2026 The qemlab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import qemlab

E_EXACT = -455.15622916778443


def test_hamiltonian_ground_energy():
    h = qemlab.load_hamiltonian()
    assert h.n_qubits == 3
    assert len(h.terms()) == 34
    assert h.ground_energy() == pytest.approx(E_EXACT, abs=1e-9)


def test_pauli_commutation():
    assert qemlab.PauliString("XZI").commutes(qemlab.PauliString("ZXI"))
    assert not qemlab.PauliString("XII").commutes(qemlab.PauliString("ZII"))


def test_strategies():
    assert qemlab.parse_strategy("zne+mem") == "MEM+ZNE"
    assert len(qemlab.benchmark_strategy_names()) == 16
    with pytest.raises(ValueError):
        qemlab.parse_strategy("SV+DSP")
    with pytest.raises(ValueError):
        qemlab.parse_strategy("TP")


def test_estimator_algebra():
    ex, ez = 0.8 / 1.7, 1.5 / 1.7
    assert qemlab.dsp_combine(ex, ez) == pytest.approx(0.6)
    assert qemlab.dsp_z_only(ez) == pytest.approx(0.6)
    assert qemlab.tomography_purify(0.5 * ex, 0.0, 0.5 * ez) == pytest.approx(0.6)
    assert qemlab.mem_apply([0.1], [0.86, 0.14]) == pytest.approx([0.95, 0.05])
    fit = qemlab.zne_fit([(1, -2.0, 1), (2, -1.9, 1), (3, -1.8, 1), (4, -1.7, 1)])
    assert fit["intercept"] == pytest.approx(-2.1)


def test_run_strategy_noiseless():
    h = qemlab.load_hamiltonian()
    truth = qemlab.ansatz_energy(h, qemlab.reference_params())
    r = qemlab.run_strategy("RAW", noise="ideal", budget=200_000, seed=3)
    assert abs(r["energy"] - truth) <= 4 * math.sqrt(r["variance"])
    assert r["shots"] == 200_000


def test_vqe_and_ghz():
    v = qemlab.vqe_train()
    assert v["converged"]
    g = qemlab.ghz_benchmark([2, 4], shots=20_000)
    assert [p["n_qubits"] for p in g] == [2, 4]
    assert all(p["f_mem"] >= p["f_raw"] for p in g)


def test_benchmark_small():
    rep = qemlab.benchmark({"strategies": ["RAW", "MEM+SV"], "budget": 100_000,
                            "prelim_fraction": 0.01, "seeds": [1], "resamples": 10,
                            "calibration_shots": 100_000})
    assert [row["strategy"] for row in rep["strategies"]] == ["RAW", "MEM+SV"]
    with pytest.raises(ValueError):
        qemlab.benchmark({"budgets": 1})
