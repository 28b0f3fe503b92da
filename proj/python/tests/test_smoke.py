# Copyright 2026 The qswap Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import qswap


def test_decomposition_identities():
    checks = qswap.verify_swap_decomposition()
    assert len(checks) == 5
    assert all(passed and dev <= 1e-12 for _, dev, passed in checks)
    assert not all(p for _, _, p in qswap.verify_swap_decomposition(1e-6))


def test_compiled_swap_is_swap():
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
    u = qswap.compile_swap()
    phase = u[0, 0]
    assert np.max(np.abs(u - phase * swap)) < 1e-12


def test_fidelity_budget():
    t1 = [77e-6, 79e-6]
    assert qswap.coherence_limited_fidelity(890e-9, t1) * 100 == pytest.approx(98.8, abs=0.1)
    assert qswap.coherence_limited_fidelity(640e-9, t1) * 100 == pytest.approx(99.2, abs=0.1)
    assert qswap.damping_process_fidelity(1.96e-6, t1) * 100 == pytest.approx(97.4, abs=0.3)


def test_ramsey_exact_matches_cosine():
    phi = [2 * math.pi * k / 16 for k in range(16)]
    pops, tracked = qswap.ramsey("CZ", 1, phi)
    ideal = [(1 - math.cos(p)) / 2 for p in phi]
    fit = qswap.fit_trace(phi, list(pops[:, tracked]), ideal)
    assert fit["mse"] < 1e-12
    assert fit["swing"] == pytest.approx(1.0, abs=1e-9)


def test_mitigation_round_trip():
    rng = np.random.default_rng(0)
    t = rng.random((9, 9)) + 5 * np.eye(9)
    t /= t.sum(axis=1, keepdims=True)
    x = rng.random(9)
    x /= x.sum()
    r = qswap.reconstruct(t.T @ x, t)
    assert np.max(np.abs(r["x"] - x)) < 1e-6


def test_shots_are_reproducible():
    phi = [2 * math.pi * k / 8 for k in range(8)]
    a, _ = qswap.ramsey("SWAP", 1, phi, backend="shots", shots=2000, seed=5)
    b, _ = qswap.ramsey("SWAP", 1, phi, backend="shots", shots=2000, seed=5)
    assert np.array_equal(a, b)


def test_fits_and_utilities():
    t = np.linspace(0, 400e-6, 80)
    f = qswap.fit_decoherence(list(t), list(np.exp(-t / 77e-6)), "T1")
    assert f["accepted"] and f["T"] == pytest.approx(77e-6, rel=1e-3)
    assert qswap.doane_bins([float(i) for i in range(1, 129)] + [-float(i) for i in range(1, 129)]) == 9
    cz, iswap = qswap.detuning_presets()
    assert cz == pytest.approx(-0.61e6, abs=1e4)
    assert iswap == pytest.approx(1.19e6, abs=1e4)
    assert qswap.check_commensurability(400e-6, 3.6e9)["commensurate"]


def test_validation_errors_map_to_value_error():
    with pytest.raises(ValueError):
        qswap.standard_gate("toffoli")
    with pytest.raises(qswap.ValidationError):
        qswap.fit_trace([0.0, 1.0], [0.5, 0.5], [0.5, 0.5])
