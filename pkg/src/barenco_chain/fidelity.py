"""Operator fidelity and fidelity-versus-time traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from barenco_chain.errors import DimensionMismatchError, NotUnitaryError
from barenco_chain.evolve import DEFAULT_STEPS_PER_GATE, frame_diagonal, propagate_params, steps_for
from barenco_chain.linalg import as_matrix

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from barenco_chain.model import ChainParams
    from barenco_chain.targets import TargetGate

# |Tr(M M^dagger) - D| beyond this fraction of D means an input was not unitary
UNITARITY_RTOL = 1e-6
BOUND_EPS = 1e-12


@dataclass(frozen=True)
class FidelityTrace:
    times: NDArray[np.float64]
    values: NDArray[np.float64]
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def at(self, t: float) -> float:
        """Value at the sample time closest to ``t``."""
        return float(self.values[np.argmin(np.abs(self.times - t))])


def operator_fidelity(u: ArrayLike, u0: ArrayLike) -> float:
    """Average pure-state fidelity between ``U`` and the target ``U0``.

    ``F = (|Tr M|^2 + Tr(M M^dagger)) / (D (D + 1))`` with ``M = U0^dagger U``.
    ``Tr(M M^dagger)`` is evaluated, not assumed to equal ``D``; a deviation
    larger than ``1e-6 D`` raises :class:`NotUnitaryError`.
    """
    u = as_matrix(u)
    u0 = as_matrix(u0)
    if u.shape != u0.shape:
        raise DimensionMismatchError(f"U is {u.shape[0]}-dimensional, target is {u0.shape[0]}-dimensional")
    return float(fidelity_many(u, u0))


def fidelity_many(u: ArrayLike, u0: ArrayLike) -> NDArray[np.float64]:
    """Vectorized :func:`operator_fidelity` over leading batch axes (broadcasting)."""
    u = np.asarray(u, dtype=np.complex128)
    u0 = np.asarray(u0, dtype=np.complex128)
    if u.shape[-2:] != u0.shape[-2:]:
        raise DimensionMismatchError(f"operator shapes {u.shape[-2:]} and {u0.shape[-2:]} differ")
    d = u.shape[-1]
    m = np.conj(np.swapaxes(u0, -1, -2)) @ u
    tr = np.trace(m, axis1=-2, axis2=-1)
    tr_mm = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    worst = np.max(np.abs(tr_mm - d)) if tr_mm.size else 0.0
    if worst > UNITARITY_RTOL * d:
        raise NotUnitaryError(f"Tr(M M^dagger) deviates from D = {d} by {worst:.3e}")
    return (np.abs(tr) ** 2 + tr_mm) / (d * (d + 1))


def sample_steps(t_final: float, samples: int, steps_per_gate: int = DEFAULT_STEPS_PER_GATE) -> tuple[float, NDArray]:
    """Step size and the step counts (including 0) at which a trace is sampled.

    Samples sit on the integration grid at ``round(i N / samples)`` for
    ``i = 0..samples``, where ``N`` covers ``t_final`` at the requested resolution.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = max(steps_for(t_final, steps_per_gate), samples)
    record = np.rint(np.arange(samples + 1) * (n / samples)).astype(np.int64)
    return t_final / n, record


def fidelity_trace(
    p: ChainParams,
    target: TargetGate,
    t_final: float,
    samples: int,
    steps_per_gate: int = DEFAULT_STEPS_PER_GATE,
) -> FidelityTrace:
    """``F(t)`` from a single forward propagation, with the ``t = 0`` point prepended."""
    if target.dim != p.dim:
        raise DimensionMismatchError(f"target is {target.dim}-dimensional but the chain has dimension {p.dim}")
    dt, record = sample_steps(t_final, samples, steps_per_gate)
    times = record * dt
    snaps = propagate_params([p], dt, record)[0]
    frame = frame_diagonal(p.n_qubits, p.angles.omega, times)
    values = fidelity_many(frame[..., :, None] * snaps, target.matrix)
    return FidelityTrace(times, values, target.label, p.as_dict())
