from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barenco_chain.errors import DivisionByZeroError, ImaginaryCouplingError, WrongSizeError
from barenco_chain.linalg import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, hermiticity_defect, kron
from barenco_chain.model import (
    ChainParams,
    GateAngles,
    basis_labels,
    build_three_qubit_hamiltonian,
    build_two_qubit_hamiltonian,
    build_xxz_hamiltonian,
    drive_amplitude,
    drive_operator,
    hamiltonian,
    validate_rwa,
)

Z3 = kron(IDENTITY2, IDENTITY2, SIGMA_Z)


def z_value(index: int, qubit: int, n: int) -> int:
    """sigma_z eigenvalue of ``qubit`` (1-based, most significant first) in basis state ``index``."""
    bit = (index >> (n - qubit)) & 1
    return 1 - 2 * bit


# -- parameters ------------------------------------------------------------------


def test_gate_angles_wrap_into_range():
    a = GateAngles(math.pi, -math.pi / 2, 5 * math.pi)
    assert a.omega == pytest.approx(1.5 * math.pi)
    assert a.phi == pytest.approx(math.pi)
    assert 0 <= GateAngles(0, -1e-18, 0).omega < 2 * math.pi


def test_three_qubit_gamma_from_resonance():
    assert ChainParams(3, 2, 8, l=17).gamma == 15.0


def test_three_qubit_needs_l_beyond_k():
    with pytest.raises(ImaginaryCouplingError):
        ChainParams(3, 2, 8, l=8)


def test_contradictory_gamma_rejected():
    with pytest.raises(ValueError):
        ChainParams(3, 2, 8, l=17, gamma=14.0)


def test_wrong_qubit_count():
    with pytest.raises(WrongSizeError):
        ChainParams(4, 2, 8)


def test_non_integer_calibration_constant():
    with pytest.raises(ValueError):
        ChainParams(2, 2.5, 8)


def test_effective_params_follow_disorder():
    p = ChainParams(3, 2, 8, l=17, delta_m=0.01, delta_k=0.02, delta_l=-0.03)
    eff = p.effective()
    assert eff.alpha == pytest.approx(2.01)
    assert eff.beta == pytest.approx(8.02)
    assert eff.j == pytest.approx(math.sqrt(16.97**2 - 8.02**2))
    assert p.drive_frequency() == pytest.approx(2 * (8.02 - 2.01))


def test_effective_params_imaginary_coupling():
    p = ChainParams(3, 2, 8, l=9, delta_k=1.5, delta_l=0.0)
    with pytest.raises(ImaginaryCouplingError):
        p.effective()


def test_basis_labels_printed_order():
    assert basis_labels(2) == ["↓↓", "↓↑", "↑↓", "↑↑"]
    assert basis_labels(3)[1] == "↓↓↑" and basis_labels(3)[6] == "↑↑↓"


# -- drive -----------------------------------------------------------------------


def test_drive_amplitude_examples():
    p = ChainParams(2, 2, 8, angles=GateAngles(math.pi, 0, 0))
    assert drive_amplitude(p, 0.0) == 1.0
    assert drive_amplitude(p, math.pi / 12) == pytest.approx(-1.0, abs=1e-15)
    off = p.with_angles(GateAngles(0.0, 1.0, 2.0))
    assert all(drive_amplitude(off, t) == 0.0 for t in np.linspace(0, 5, 11))


@settings(max_examples=50, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi), st.floats(-10, 10))
def test_drive_amplitude_period_and_bound(varphi, phi, t):
    p = ChainParams(2, 2, 8, angles=GateAngles(varphi, 0, phi))
    period = math.pi / (p.k - p.m)
    assert abs(drive_amplitude(p, t)) <= varphi / math.pi + 1e-15
    assert drive_amplitude(p, t + period) == pytest.approx(drive_amplitude(p, t), abs=1e-12)


# -- two qubits ------------------------------------------------------------------


def test_two_qubit_static_diagonal():
    p = ChainParams(2, 2, 8, angles=GateAngles(0.0, math.pi / 2, 0.0))
    h = build_two_qubit_hamiltonian(p, 0.3)
    assert np.allclose(np.diag(h).real, [10.25, -9.75, -6.5, 5.5], atol=1e-15)
    assert np.count_nonzero(h - np.diag(np.diag(h))) == 0


def test_two_qubit_drive_pattern():
    p = ChainParams(2, 2, 8, angles=GateAngles(math.pi, 0.0, 0.0))
    h = build_two_qubit_hamiltonian(p, 0.0)
    off = h - np.diag(np.diag(h))
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 0] = expected[2, 3] = expected[3, 2] = 1.0
    assert np.array_equal(off, expected)


def test_two_qubit_matches_pauli_form_on_idle_block():
    # (omega/2pi) Z1 + beta Z1 Z2 + alpha Z2 in the index convention; identical on the first two states
    p = ChainParams(2, 2, 8, angles=GateAngles(0.0, 1.3, 0.0))
    w = 1.3 / (2 * math.pi)
    pauli = w * kron(SIGMA_Z, IDENTITY2) + 8 * kron(SIGMA_Z, SIGMA_Z) + 2 * kron(IDENTITY2, SIGMA_Z)
    h = build_two_qubit_hamiltonian(p, 0.0)
    assert np.allclose(np.diag(h)[:2], np.diag(pauli)[:2], atol=1e-15)
    # the active block carries -omega/pi instead of -omega/2pi
    assert np.allclose(np.diag(h)[2:] - np.diag(pauli)[2:], -w, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(-5, 5),
    st.integers(-10, 10),
    st.floats(0, math.pi),
    st.floats(0, 2 * math.pi),
    st.floats(0, 2 * math.pi),
    st.floats(0, 10),
)
def test_builders_are_exactly_hermitian(m, k, varphi, omega, phi, t):
    angles = GateAngles(varphi, omega, phi)
    assert hermiticity_defect(build_two_qubit_hamiltonian(ChainParams(2, m, k, angles=angles), t)) == 0.0
    p3 = ChainParams(3, m, k, gamma=abs(k) + 1.5, angles=angles)
    assert hermiticity_defect(build_three_qubit_hamiltonian(p3, t)) <= 1e-15


def test_two_qubit_wrong_size():
    with pytest.raises(WrongSizeError):
        build_two_qubit_hamiltonian(ChainParams(3, 2, 8, l=17), 0.0)


def test_two_qubit_spectrum_without_drive():
    p = ChainParams(2, 2, 8, angles=GateAngles(0.0, 2.0, 1.0))
    h = build_two_qubit_hamiltonian(p, 1.7)
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), np.sort(np.diag(h).real))


# -- XXZ -------------------------------------------------------------------------


def test_xxz_without_phase_is_isotropic():
    p = ChainParams(2, 2, 8, gamma=3.0, angles=GateAngles(0, 0, 0))
    expected = 1.5 * (kron(SIGMA_X, SIGMA_X) + kron(SIGMA_Y, SIGMA_Y) + kron(SIGMA_Z, SIGMA_Z))
    assert np.allclose(build_xxz_hamiltonian(p), expected, atol=1e-15)


def test_xxz_zz_prefactor_and_flip_flop():
    p = ChainParams(2, 2, 8, gamma=15.0, angles=GateAngles(0, math.pi / 2, 0))
    h = build_xxz_hamiltonian(p)
    field = math.pi / 2 / (4 * math.pi)
    # <00|H|00> = zz + 2 field, <01|H|01> = -zz
    assert h[1, 1].real == pytest.approx(-7.375)
    assert h[0, 0].real == pytest.approx(7.375 + 2 * field)
    assert h[1, 2] == pytest.approx(15.0)
    assert h[2, 1] == pytest.approx(15.0)


def test_xxz_zero_coupling():
    with pytest.raises(DivisionByZeroError):
        build_xxz_hamiltonian(ChainParams(2, 2, 8, gamma=0.0))


# -- three qubits ----------------------------------------------------------------


def test_three_qubit_field_only():
    p = ChainParams(3, 2, 0, gamma=1e-300, angles=GateAngles(0, 0, 0))
    h = build_three_qubit_hamiltonian(p, 0.0)
    assert np.allclose(h, 2 * Z3, atol=1e-290)


def test_three_qubit_ising_diagonal_by_index():
    p = ChainParams(3, 2, 8, l=17, angles=GateAngles(0, 0, 0))
    h = build_three_qubit_hamiltonian(p, 0.0)
    xxz_diag = np.diag(build_xxz_hamiltonian(p)).real
    for i in range(8):
        z2, z3 = z_value(i, 2, 3), z_value(i, 3, 3)
        assert h[i, i].real == pytest.approx(xxz_diag[i >> 1] + 8 * z2 * z3 + 2 * z3)
    # index 2: qubit 2 has sigma_z = -1 and qubit 3 has +1, so the Ising terms add alpha - beta
    assert h[2, 2].real - xxz_diag[1] == pytest.approx(2 - 8)


def test_three_qubit_conserves_target_z_without_drive():
    p = ChainParams(3, 2, 8, l=17, angles=GateAngles(0, 1.1, 0.4))
    h = build_three_qubit_hamiltonian(p, 0.8)
    assert np.max(np.abs(h @ Z3 - Z3 @ h)) <= 1e-12


def test_three_qubit_drive_is_sigma_x_on_last_qubit():
    assert np.array_equal(drive_operator(3), kron(IDENTITY2, IDENTITY2, SIGMA_X))
    p = ChainParams(3, 2, 8, l=17, angles=GateAngles(math.pi, 0, 0))
    diff = hamiltonian(p, 0.0) - hamiltonian(p.with_angles(GateAngles(0, 0, 0)), 0.0)
    assert np.allclose(diff, drive_operator(3), atol=1e-15)


def test_three_qubit_wrong_size():
    with pytest.raises(WrongSizeError):
        build_three_qubit_hamiltonian(ChainParams(2, 2, 8), 0.0)


# -- validate_rwa ----------------------------------------------------------------


def test_validate_rwa_clean_figure_set():
    assert validate_rwa(ChainParams(2, 2, 8, angles=GateAngles(math.pi, 0, 0))) == []


def test_validate_rwa_small_detuning():
    warnings = validate_rwa(ChainParams(2, 2, 3, angles=GateAngles(math.pi, 0, 0)))
    assert len(warnings) == 1 and "|k - m|" in warnings[0]


def test_validate_rwa_varphi_range():
    warnings = validate_rwa(ChainParams(2, 2, 8, angles=GateAngles(1.1 * math.pi, 0, 0)))
    assert any("outside [0, pi]" in w for w in warnings)


def test_validate_rwa_amplitude_dominance():
    warnings = validate_rwa(ChainParams(2, 0, 8, angles=GateAngles(math.pi / 2, 0, 0)))
    assert any("drive amplitude" in w for w in warnings)
