from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barenco_chain.errors import DimensionMismatchError, NotUnitaryError
from barenco_chain.fidelity import fidelity_many, fidelity_trace, operator_fidelity, sample_steps
from barenco_chain.linalg import SIGMA_X, block_diag, expm_i
from barenco_chain.model import CNOT_ANGLES, ChainParams, GateAngles
from barenco_chain.targets import TargetGate, barenco, cnot, toffoli

from conftest import random_hermitian, random_unitary


def reference_fidelity(u: np.ndarray, u0: np.ndarray) -> float:
    """The unitary-only form (D f + 1)/(D + 1) with f = |Tr M|^2 / D^2."""
    d = u.shape[0]
    f = abs(np.trace(u0.conj().T @ u)) ** 2 / d**2
    return (d * f + 1) / (d + 1)


def test_identical_operators(rng):
    u = random_unitary(rng, 8)
    assert operator_fidelity(u, u) == pytest.approx(1.0, abs=1e-14)


def test_global_phase_is_invisible(rng):
    u = random_unitary(rng, 4)
    assert operator_fidelity(np.exp(0.83j) * u, u) == pytest.approx(1.0, abs=1e-14)


def test_traceless_overlap_hits_lower_bound():
    assert operator_fidelity(block_diag(SIGMA_X, SIGMA_X), np.eye(4)) == pytest.approx(0.2, abs=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        operator_fidelity(np.eye(4), np.eye(8))


def test_not_unitary_guard_fires():
    with pytest.raises(NotUnitaryError):
        operator_fidelity(2 * np.eye(4), np.eye(4))


def test_guard_tolerates_small_drift():
    u = np.eye(4) * (1 + 1e-9)
    operator_fidelity(u, np.eye(4))


def test_bounds_over_random_pairs():
    rng = np.random.default_rng(7)
    for i in range(1000):
        d = (2, 4, 8)[i % 3]
        f = operator_fidelity(
            expm_i(random_hermitian(rng, d, 3.0), 1.0), expm_i(random_hermitian(rng, d, 3.0), 1.0)
        )
        assert 1 / (d + 1) - 1e-12 <= f <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 8]))
def test_symmetry_invariance_and_printed_forms_agree(seed, d):
    rng = np.random.default_rng(seed)
    u, u0, w = (random_unitary(rng, d) for _ in range(3))
    f = operator_fidelity(u, u0)
    assert f == pytest.approx(operator_fidelity(u0, u), abs=1e-12)
    assert f == pytest.approx(operator_fidelity(w @ u, w @ u0), abs=1e-12)
    assert f == pytest.approx(operator_fidelity(u @ w, u0 @ w), abs=1e-12)
    assert f == pytest.approx(reference_fidelity(u, u0), abs=1e-13)


def test_fidelity_many_broadcasts(rng):
    us = np.stack([random_unitary(rng, 4) for _ in range(5)])
    target = random_unitary(rng, 4)
    batch = fidelity_many(us, target)
    assert batch.shape == (5,)
    assert np.allclose(batch, [operator_fidelity(u, target) for u in us], atol=1e-15, rtol=0)


def test_sample_steps_grid():
    dt, record = sample_steps(1.5 * math.pi, 300, 4096)
    assert record[0] == 0 and record[-1] == 6144 and len(record) == 301
    assert record[200] == 4096
    assert dt == pytest.approx(math.pi / 4096)
    assert np.all(np.diff(record) > 0)


def test_trace_starts_at_identity_overlap():
    p = ChainParams(2, 2, 8, angles=CNOT_ANGLES)
    tr = fidelity_trace(p, cnot(), math.pi, 10, steps_per_gate=512)
    assert tr.times[0] == 0.0
    assert tr.values[0] == pytest.approx(operator_fidelity(np.eye(4), cnot().matrix))
    assert np.all(np.diff(tr.times) > 0)
    assert np.all(tr.values >= 0.2 - 1e-12) and np.all(tr.values <= 1 + 1e-12)


def test_trace_identity_target_without_drive():
    p = ChainParams(2, 2, 8, angles=GateAngles(0.0, 0.0, 0.0))
    tr = fidelity_trace(p, TargetGate(np.eye(4), "I"), 2.0, 20, steps_per_gate=256)
    assert tr.values[0] == 1.0
    assert np.all(tr.values >= 0.2 - 1e-12) and np.all(tr.values <= 1 + 1e-12)


def test_trace_value_agrees_with_single_propagation():
    from barenco_chain.evolve import propagate, scoring_frame

    p = ChainParams(3, 2, 8, l=17, angles=GateAngles(2.0, 1.0, 0.5))
    target = barenco(3, p.angles)
    tr = fidelity_trace(p, target, math.pi, 4, steps_per_gate=1024)
    u = scoring_frame(p, math.pi) @ propagate(p, math.pi, 1024).u
    assert tr.at(math.pi) == pytest.approx(operator_fidelity(u, target.matrix), abs=1e-12)


def test_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        fidelity_trace(ChainParams(2, 2, 8), toffoli(), math.pi, 3)


@pytest.mark.xfail(
    strict=True,
    reason="the CNOT point itself reaches F = 0.9939; only the grid average clears 0.998 (see acceptance criterion 4)",
)
def test_single_sample_trace_reaches_threshold_at_cnot_point():
    p = ChainParams(2, 2, 8, angles=CNOT_ANGLES)
    tr = fidelity_trace(p, barenco(2, CNOT_ANGLES), math.pi, 1)
    assert tr.values[-1] > 0.998
