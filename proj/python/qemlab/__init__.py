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

"""Quantum error mitigation benchmarks (C++ core)."""

import json
import os
from pathlib import Path

_data = Path(__file__).resolve().parent / "data"
if "QEMLAB_DATA_DIR" not in os.environ and _data.is_dir():
    os.environ["QEMLAB_DATA_DIR"] = str(_data)

from ._core import (  # noqa: E402
    EmptyPostSelection,
    PauliString,
    PauliSum,
    ansatz_energy,
    benchmark_strategy_names,
    dsp_combine,
    dsp_z_only,
    load_hamiltonian,
    mem_apply,
    parse_strategy,
    pauli_sum,
    reference_params,
    tomography_purify,
)
from . import _core  # noqa: E402


def zne_fit(points, method="WLS"):
    """Linear fit of (lambda, estimate, variance) points; returns a dict."""
    return json.loads(_core._zne_fit([tuple(p) for p in points], method))


def run_strategy(strategy, params=None, noise="falcon-like", budget=1_000_000,
                 prelim_fraction=0.001, seed=1):
    return json.loads(_core._run_strategy(strategy, params, noise, budget, prelim_fraction, seed))


def vqe_train(init=None, max_iterations=500, learning_rate=0.05):
    init = [0.0] * 6 if init is None else list(init)
    return json.loads(_core._vqe_train(init, max_iterations, learning_rate))


def ghz_benchmark(sizes, noise="falcon-like", shots=100_000, seed=1, with_mem=True):
    return json.loads(_core._ghz_benchmark(list(sizes), noise, shots, seed, with_mem))


def benchmark(config=None, threads=1):
    """Runs the strategy matrix; `config` uses the experiment config JSON keys."""
    return json.loads(_core._benchmark(json.dumps(config or {}), threads))


__all__ = [
    "EmptyPostSelection", "PauliString", "PauliSum", "ansatz_energy", "benchmark",
    "benchmark_strategy_names", "dsp_combine", "dsp_z_only", "ghz_benchmark",
    "load_hamiltonian", "mem_apply", "parse_strategy", "pauli_sum", "reference_params",
    "run_strategy", "tomography_purify", "vqe_train", "zne_fit",
]
