"""Ideal gates the simulated propagators are scored against."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np

from barenco_chain.errors import UnsupportedSizeError
from barenco_chain.model import CNOT_ANGLES, GateAngles

if TYPE_CHECKING:
    from numpy.typing import NDArray

PhiConvention = Literal["definition", "realized"]


@dataclass(frozen=True)
class TargetGate:
    matrix: NDArray[np.complex128]
    label: str
    angles: GateAngles | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def barenco_block(angles: GateAngles, phi_convention: PhiConvention = "definition") -> NDArray[np.complex128]:
    """The active 2x2 block of the Barenco gate.

    ``"definition"`` puts ``-i e^{i(omega - phi)} sin(varphi/2)`` in the upper
    right, which is what the driven chain produces. ``"realized"`` swaps the
    sign of ``phi`` (the two agree whenever ``phi = 0``).
    """
    vp, om, ph = angles.as_tuple()
    if phi_convention == "realized":
        ph = -ph
    elif phi_convention != "definition":
        raise ValueError(f"unknown phi convention {phi_convention!r}")
    c = np.exp(1j * om) * math.cos(vp / 2)
    s = math.sin(vp / 2)
    return np.array(
        [
            [c, -1j * np.exp(1j * (om - ph)) * s],
            [-1j * np.exp(1j * (om + ph)) * s, c],
        ],
        dtype=np.complex128,
    )


def barenco(n_qubits: int, angles: GateAngles, phi_convention: PhiConvention = "definition") -> TargetGate:
    """``V_N(varphi, omega, phi)``: identity except on the last two basis states."""
    if n_qubits not in (2, 3):
        raise UnsupportedSizeError(f"Barenco gates are built for 2 or 3 qubits, not {n_qubits}")
    d = 2**n_qubits
    u = np.eye(d, dtype=np.complex128)
    u[d - 2 :, d - 2 :] = barenco_block(angles, phi_convention)
    return TargetGate(u, f"V{n_qubits}({angles.varphi:.6g}, {angles.omega:.6g}, {angles.phi:.6g})", angles)


def _controlled_x(n_qubits: int) -> NDArray[np.complex128]:
    d = 2**n_qubits
    u = np.eye(d, dtype=np.complex128)
    u[d - 2 :, d - 2 :] = [[0, 1], [1, 0]]
    return u


def cnot() -> TargetGate:
    """Exact CNOT; equals ``barenco(2, (pi, pi/2, 0))`` up to rounding."""
    return TargetGate(_controlled_x(2), "CNOT", CNOT_ANGLES)


def toffoli() -> TargetGate:
    return TargetGate(_controlled_x(3), "Toffoli", CNOT_ANGLES)


def controlled_phase(omega: float) -> TargetGate:
    """``G(omega) = diag(1, 1, 1, e^{i omega})``."""
    return TargetGate(np.diag([1, 1, 1, np.exp(1j * omega)]).astype(np.complex128), f"G({omega:.6g})")
