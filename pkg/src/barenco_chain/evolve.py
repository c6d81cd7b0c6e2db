"""Time-evolution operators.

The numerical propagator is the exponential midpoint rule

    U <- exp(-i H(t_j + dt/2) dt) U,

which is unitary at every step and globally second order. Before stepping,
the basis is split into the connected components ("sectors") of the
Hamiltonian's sparsity pattern; each sector is propagated on its own, which is
exact because the Hamiltonian is block diagonal in that permuted basis.

The remaining functions are the closed-form frame changes and rotating-wave
predictions used to cross-check the numerics.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from barenco_chain import _kernels
from barenco_chain.errors import BudgetExceededError, NoConvergenceError, WrongSizeError
from barenco_chain.linalg import JACOBI_MAX_SWEEPS, JACOBI_TOL, block_diag, unitarity_defect
from barenco_chain.model import (
    GATE_TIME,
    TWO_PI,
    ChainParams,
    GateAngles,
    drive_amplitude,
    drive_operator,
    static_hamiltonian,
)

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

DEFAULT_STEPS_PER_GATE = 4096
REFINE_FLOOR = 512
MAX_STEPS = 2**24

# indices (in the 8-state basis) of the four-level block coupled by both J and the drive
H2_SUBSPACE = (2, 3, 4, 5)


@dataclass(frozen=True)
class PropagatorResult:
    u: NDArray[np.complex128]
    t_final: float
    steps: int
    unitarity_defect: float


def steps_for(t_final: float, steps_per_gate: int = DEFAULT_STEPS_PER_GATE) -> int:
    """Number of midpoint steps covering ``[0, t_final]`` at ``steps_per_gate`` per gate time."""
    return max(1, int(round(t_final / GATE_TIME * steps_per_gate)))


def sectors(pattern: ArrayLike) -> list[NDArray[np.intp]]:
    """Connected components of a (symmetric) boolean coupling pattern, each sorted, ordered by first index."""
    pat = np.asarray(pattern, dtype=bool)
    n = pat.shape[0]
    seen = np.zeros(n, dtype=bool)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        members = []
        while stack:
            i = stack.pop()
            members.append(i)
            for j in np.flatnonzero(pat[i] | pat[:, i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        out.append(np.array(sorted(members), dtype=np.intp))
    return out


def propagate_many(
    h_static: ArrayLike,
    drive: ArrayLike,
    amp: ArrayLike,
    freq: ArrayLike,
    phase: ArrayLike,
    dt: float,
    record: ArrayLike,
    t0: float = 0.0,
) -> NDArray[np.complex128]:
    """Propagate a batch of ``H_b(t) = h_static[b] + amp[b] cos(freq[b] t - phase[b]) drive``.

    Returns an array of shape ``(B, len(record), D, D)`` holding the propagator
    from ``t0`` after ``record[s]`` steps of size ``dt``.
    """
    h_static = np.ascontiguousarray(h_static, dtype=np.complex128)
    drive = np.ascontiguousarray(drive, dtype=np.complex128)
    amp = np.ascontiguousarray(amp, dtype=np.float64)
    freq = np.ascontiguousarray(freq, dtype=np.float64)
    phase = np.ascontiguousarray(phase, dtype=np.float64)
    record = np.ascontiguousarray(record, dtype=np.int64)
    if record.ndim != 1 or record.size == 0 or np.any(np.diff(record) < 0) or record[0] < 0:
        raise ValueError("record must be a non-empty, sorted array of non-negative step counts")
    nb, d, _ = h_static.shape
    pattern = (np.abs(h_static) > 0).any(axis=0) | (np.abs(drive) > 0)
    out = np.zeros((nb, record.size, d, d), dtype=np.complex128)
    for idx in sectors(pattern):
        sub_h = np.ascontiguousarray(h_static[:, idx][:, :, idx])
        sub_v = np.ascontiguousarray(drive[np.ix_(idx, idx)])
        sub_out = np.empty((nb, record.size, idx.size, idx.size), dtype=np.complex128)
        status = _kernels.evolve_batch(
            sub_h, sub_v, amp, freq, phase, float(t0), float(dt), record, sub_out, JACOBI_TOL, JACOBI_MAX_SWEEPS
        )
        if status != _kernels.OK:
            raise NoConvergenceError(f"Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps during propagation")
        out[:, :, idx[:, None], idx[None, :]] = sub_out
    return out


def drive_arrays(params: Sequence[ChainParams]) -> tuple[NDArray, NDArray, NDArray]:
    """Per-element drive amplitude ``varphi/pi``, angular frequency and phase."""
    amp = np.array([p.angles.varphi / math.pi for p in params])
    freq = np.array([p.drive_frequency() for p in params])
    phase = np.array([p.angles.phi for p in params])
    return amp, freq, phase


def propagate_params(
    params: Sequence[ChainParams], dt: float, record: ArrayLike, t0: float = 0.0
) -> NDArray[np.complex128]:
    """:func:`propagate_many` for a list of chains of the same size."""
    sizes = {p.n_qubits for p in params}
    if len(sizes) != 1:
        raise WrongSizeError(f"cannot batch chains of different sizes {sorted(sizes)}")
    h_static = np.stack([static_hamiltonian(p) for p in params])
    return propagate_many(h_static, drive_operator(sizes.pop()), *drive_arrays(params), dt, record, t0)


def propagate(p: ChainParams, t_final: float, steps: int, t0: float = 0.0) -> PropagatorResult:
    """Time-ordered propagator from ``t0`` to ``t0 + t_final`` in ``steps`` midpoint steps."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    u = propagate_params([p], t_final / steps, [steps], t0)[0, 0]
    return PropagatorResult(u, t_final, steps, unitarity_defect(u))


def refine_until_converged(
    p: ChainParams, t_final: float, tol: float, floor: int = REFINE_FLOOR, max_steps: int = MAX_STEPS
) -> PropagatorResult:
    """Double the step count from ``floor`` until two successive propagators agree entrywise to ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    coarse = propagate(p, t_final, floor)
    steps = floor
    while True:
        steps *= 2
        if steps > max_steps:
            raise BudgetExceededError(f"no convergence to {tol:g} within {max_steps} steps")
        fine = propagate(p, t_final, steps)
        if np.max(np.abs(fine.u - coarse.u)) < tol:
            return fine
        coarse = fine


# -- frames and closed-form predictions ---------------------------------------


def rotating_frame_2q(p: ChainParams, t: float) -> NDArray[np.complex128]:
    """``U_hat(t) = e^{i omega t/2pi} diag(1, 1, e^{-i omega t/2pi}, e^{-i omega t/2pi})``."""
    if p.n_qubits != 2:
        raise WrongSizeError("the two-qubit rotating frame needs n_qubits = 2")
    return np.diag(frame_diagonal(2, p.angles.omega, t)).astype(np.complex128)


def frame_diagonal(n_qubits: int, omega: ArrayLike, t: ArrayLike) -> NDArray[np.complex128]:
    """Diagonal of the frame in which propagators are scored, broadcast over ``omega`` and ``t``.

    The two-qubit static diagonal carries ``-omega/pi`` on the active block; in
    the frame ``U_hat(t)`` the propagator then equals the lab-frame evolution
    of ``(omega/2pi) Z1 + beta Z1 Z2 + alpha Z2 + drive`` up to a global phase.
    The three-qubit Hamiltonian is scored in the lab frame.
    """
    phase = np.exp(1j * np.multiply.outer(omega, t) / TWO_PI)
    one = np.ones_like(phase)
    if n_qubits == 2:
        return np.stack([phase, phase, one, one], axis=-1)
    if n_qubits == 3:
        return np.stack([one] * 8, axis=-1)
    raise WrongSizeError(f"no scoring frame for {n_qubits} qubits")


def scoring_frame(p: ChainParams, t: float) -> NDArray[np.complex128]:
    return np.diag(frame_diagonal(p.n_qubits, p.angles.omega, t)).astype(np.complex128)


def lower_block_rotation(angles: GateAngles, t: float) -> NDArray[np.complex128]:
    """``exp(-i H_eff t)`` for ``H_eff = (varphi/2pi)(cos phi X + sin phi Y)``."""
    theta = angles.varphi * t / TWO_PI
    c, s = math.cos(theta), math.sin(theta)
    e = np.exp(1j * angles.phi)
    return np.array([[c, -1j * np.conj(e) * s], [-1j * e * s, c]], dtype=np.complex128)


def effective_lower_propagator(angles: GateAngles, p: ChainParams, t: float) -> NDArray[np.complex128]:
    """Rotating-wave propagator of the driven (control-conditioned) 2x2 block, back in the rotating frame.

    ``e^{i omega t/pi} diag(e^{-i(alpha-beta)t}, e^{i(alpha-beta)t}) R(t)`` where
    ``R`` is :func:`lower_block_rotation`. At the gate time the diagonal factor
    reduces to the global sign ``(-1)^(m-k)``.
    """
    eff = p.effective()
    delta = eff.alpha - eff.beta
    static = np.diag([np.exp(-1j * delta * t), np.exp(1j * delta * t)])
    return np.exp(1j * angles.omega * t / math.pi) * static @ lower_block_rotation(angles, t)


def effective_upper_propagator(p: ChainParams, t: float) -> NDArray[np.complex128]:
    """Idle block: the drive averages out, leaving the static phases ``diag(e^{-i(alpha+beta)t}, e^{i(alpha+beta)t})``."""
    eff = p.effective()
    s = eff.alpha + eff.beta
    return np.diag([np.exp(-1j * s * t), np.exp(1j * s * t)]).astype(np.complex128)


def effective_block3_propagator(p: ChainParams, t: float) -> NDArray[np.complex128]:
    """Diagonal rotating-wave propagator of the four-level block, in the eigenbasis of its static part.

    Entries are ordered by static energy ``alpha + r, alpha - r, -alpha + r, -alpha - r``
    (``r = sqrt(J^2 + beta^2)``). The block's uniform ``-J`` diagonal shift gives
    the prefactor ``e^{+iJt}``, so without drive this is exactly the evolution
    under :func:`h2_input_block` in its eigenbasis. At resonant gate times
    (integer ``J``) the sign of that prefactor does not matter.
    """
    if p.n_qubits != 3:
        raise WrongSizeError("the four-level block exists only for three qubits")
    eff = p.effective()
    r = math.hypot(eff.j, eff.beta)
    a = eff.alpha
    energies = np.array([a + r, a - r, -a + r, -a - r])
    return np.exp(1j * eff.j * t) * np.diag(np.exp(-1j * energies * t))


def h2_block(p: ChainParams, t: float | None = None) -> NDArray[np.complex128]:
    """The four-level block on :data:`H2_SUBSPACE`, static part only when ``t`` is None.

    The energy ``J/2 + omega/4pi`` of the idle control level is removed as a
    global phase, which leaves ``alpha - beta - J, -alpha + beta - J,
    alpha + beta - J, -alpha - beta - J`` on the diagonal and ``J`` couplings.
    """
    if p.n_qubits != 3:
        raise WrongSizeError("the four-level block exists only for three qubits")
    h = static_hamiltonian(p)
    if t is not None:
        h = h + drive_amplitude(p, t) * drive_operator(3)
    idx = np.array(H2_SUBSPACE)
    shift = p.effective().j / 2 + p.angles.omega / (2 * TWO_PI)
    return h[np.ix_(idx, idx)] - shift * np.eye(4)


def h2_input_block(p: ChainParams) -> NDArray[np.complex128]:
    return h2_block(p, None)


def rwa_discrepancy(p: ChainParams, t: float, steps_per_gate: int = DEFAULT_STEPS_PER_GATE) -> float:
    """``1 - F`` between the exact two-qubit propagator and the rotating-wave prediction.

    Both sides are compared in the frame ``U_hat(t)``; the prediction is the
    idle block's static phases joined with :func:`effective_lower_propagator`.
    """
    from barenco_chain.fidelity import operator_fidelity

    if p.n_qubits != 2:
        raise WrongSizeError("rwa_discrepancy is defined for the two-qubit chain")
    if t == 0:
        return 0.0
    exact = propagate(p, t, steps_for(t, steps_per_gate)).u
    predicted = block_diag(effective_upper_propagator(p, t), effective_lower_propagator(p.angles, p, t))
    return 1.0 - operator_fidelity(rotating_frame_2q(p, t) @ exact, predicted)
