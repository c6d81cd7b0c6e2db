"""Chain parameterization and Hamiltonian builders.

Units: the drive energy scale ``A`` and ``hbar`` are both 1, so energies are in
units of ``A``, times in units of ``hbar/A`` and the gate time is ``pi``.

Basis convention: computational index ``i`` of an ``n``-qubit operator reads
as binary with qubit 1 as the most significant bit. Single-qubit operators use
``sigma_z = diag(+1, -1)``, so digit 0 is the ``sigma_z = +1`` state. Labels
returned by :func:`basis_labels` follow the order printed with the model
(digit 0 written as a down arrow); under that reading the two-qubit static
diagonal below matches the Pauli form ``(omega/2pi) Z1 + beta Z1 Z2 + alpha Z2``
up to the ``omega`` coefficient on the last two states.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING

import numpy as np

from barenco_chain.errors import DivisionByZeroError, ImaginaryCouplingError, WrongSizeError
from barenco_chain.linalg import IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z, kron

if TYPE_CHECKING:
    from numpy.typing import NDArray

TWO_PI = 2.0 * math.pi
GATE_TIME = math.pi


def _wrap(x: float) -> float:
    r = math.fmod(float(x), TWO_PI)
    if r < 0.0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


@dataclass(frozen=True)
class GateAngles:
    """Barenco angles ``(varphi, omega, phi)`` in radians.

    ``omega`` and ``phi`` are reduced into ``[0, 2pi)``. ``varphi`` is kept
    as given; values outside ``[0, pi]`` are reported by :func:`validate_rwa`.
    """

    varphi: float = 0.0
    omega: float = 0.0
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "varphi", float(self.varphi))
        object.__setattr__(self, "omega", _wrap(self.omega))
        object.__setattr__(self, "phi", _wrap(self.phi))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.varphi, self.omega, self.phi)


CNOT_ANGLES = GateAngles(math.pi, math.pi / 2, 0.0)
TOFFOLI_ANGLES = CNOT_ANGLES


@dataclass(frozen=True)
class EffectiveParams:
    """Couplings after disorder: ``alpha = m + dm``, ``beta = k + dk``, ``J`` (3 qubits only)."""

    alpha: float
    beta: float
    j: float | None = None


@dataclass(frozen=True)
class ChainParams:
    """Physical configuration of a driven two- or three-qubit chain.

    ``gamma`` is the exchange coupling ``J / A``. For three qubits it defaults
    to ``sqrt(l^2 - k^2)`` when the resonance index ``l`` is given. The
    ``delta_*`` fields perturb ``m``, ``k`` and ``l`` for disorder studies.
    """

    n_qubits: int
    m: int
    k: int
    l: int | None = None
    gamma: float | None = None
    angles: GateAngles = GateAngles()
    delta_m: float = 0.0
    delta_k: float = 0.0
    delta_l: float = 0.0

    def __post_init__(self) -> None:
        if self.n_qubits not in (2, 3):
            raise WrongSizeError(f"n_qubits must be 2 or 3, got {self.n_qubits}")
        for name in ("m", "k") + (("l",) if self.l is not None else ()):
            value = getattr(self, name)
            if float(value) != int(value):
                raise ValueError(f"{name} must be an integer, got {value}")
            object.__setattr__(self, name, int(value))
        if self.n_qubits == 3 and self.gamma is None:
            if self.l is None:
                raise ValueError("three-qubit chains need either l or gamma")
            if self.l * self.l <= self.k * self.k:
                raise ImaginaryCouplingError(f"l = {self.l} must exceed |k| = {abs(self.k)}")
            object.__setattr__(self, "gamma", math.sqrt(self.l**2 - self.k**2))
        elif self.gamma is not None:
            object.__setattr__(self, "gamma", float(self.gamma))
            if self.l is not None:
                resonant = math.sqrt(max(self.l**2 - self.k**2, 0))
                if abs(self.gamma - resonant) > 1e-12 * max(1.0, resonant):
                    raise ValueError(f"gamma = {self.gamma} contradicts the resonance sqrt(l^2 - k^2) = {resonant}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def replace(self, **changes) -> ChainParams:
        return dataclasses.replace(self, **changes)

    def with_angles(self, angles: GateAngles) -> ChainParams:
        return dataclasses.replace(self, angles=angles)

    def effective(self) -> EffectiveParams:
        alpha = self.m + self.delta_m
        beta = self.k + self.delta_k
        if self.n_qubits == 2:
            return EffectiveParams(alpha, beta)
        if self.l is None:
            return EffectiveParams(alpha, beta, self.gamma)
        l_eff = self.l + self.delta_l
        radicand = l_eff * l_eff - beta * beta
        if radicand <= 0.0:
            raise ImaginaryCouplingError(f"(l + dl)^2 = {l_eff**2:.6g} <= (k + dk)^2 = {beta**2:.6g}: J is not real")
        return EffectiveParams(alpha, beta, math.sqrt(radicand))

    def drive_frequency(self) -> float:
        eff = self.effective()
        return 2.0 * (eff.beta - eff.alpha)

    def as_dict(self) -> dict[str, float | int | None]:
        return {
            "n": self.n_qubits,
            "m": self.m,
            "k": self.k,
            "l": self.l,
            "gamma": self.gamma,
            "varphi": self.angles.varphi,
            "omega": self.angles.omega,
            "phi": self.angles.phi,
            "delta_m": self.delta_m,
            "delta_k": self.delta_k,
            "delta_l": self.delta_l,
        }


def basis_labels(n_qubits: int) -> list[str]:
    """Computational basis labels in index order, e.g. ``['↓↓', '↓↑', '↑↓', '↑↑']``."""
    return ["".join(bits) for bits in product("↓↑", repeat=n_qubits)]


def drive_amplitude(p: ChainParams, t: float) -> float:
    """Transverse drive ``Omega(t) = (varphi/pi) cos(2 (k - m) t - phi)`` with perturbed ``k``, ``m``."""
    a = p.angles
    return a.varphi / math.pi * math.cos(p.drive_frequency() * t - a.phi)


def drive_operator(n_qubits: int) -> NDArray[np.complex128]:
    """The operator multiplied by ``Omega(t)``: sigma_x on the last qubit."""
    if n_qubits == 2:
        return kron(IDENTITY2, SIGMA_X)
    if n_qubits == 3:
        return kron(IDENTITY2, IDENTITY2, SIGMA_X)
    raise WrongSizeError(f"no drive operator for {n_qubits} qubits")


def two_qubit_static(p: ChainParams) -> NDArray[np.complex128]:
    if p.n_qubits != 2:
        raise WrongSizeError(f"two-qubit builder called with n_qubits = {p.n_qubits}")
    eff = p.effective()
    a, b = eff.alpha, eff.beta
    w = p.angles.omega / TWO_PI
    return np.diag([a + b + w, -a - b + w, a - b - 2 * w, -a + b - 2 * w]).astype(np.complex128)


def build_two_qubit_hamiltonian(p: ChainParams, t: float) -> NDArray[np.complex128]:
    """Static diagonal plus ``Omega(t) (sigma_x ⊕ sigma_x)`` in the order ↓↓, ↓↑, ↑↓, ↑↑."""
    return two_qubit_static(p) + drive_amplitude(p, t) * drive_operator(2)


def build_xxz_hamiltonian(p: ChainParams) -> NDArray[np.complex128]:
    """``(J/2)[XX + YY + (1 - omega/(2 pi J)) ZZ] + (omega/4pi)(Z1 + Z2)`` on the first two qubits."""
    j = p.effective().j if p.n_qubits == 3 else p.gamma
    if j is None:
        raise ValueError("the XXZ coupling needs gamma (or l) to be set")
    if j == 0.0:
        raise DivisionByZeroError("anisotropy 1 - omega/(2 pi J) is undefined for J = 0")
    w = p.angles.omega
    return 0.5 * j * (
        kron(SIGMA_X, SIGMA_X) + kron(SIGMA_Y, SIGMA_Y) + (1.0 - w / (TWO_PI * j)) * kron(SIGMA_Z, SIGMA_Z)
    ) + w / (2.0 * TWO_PI) * (kron(SIGMA_Z, IDENTITY2) + kron(IDENTITY2, SIGMA_Z))


def three_qubit_static(p: ChainParams) -> NDArray[np.complex128]:
    if p.n_qubits != 3:
        raise WrongSizeError(f"three-qubit builder called with n_qubits = {p.n_qubits}")
    eff = p.effective()
    return (
        kron(build_xxz_hamiltonian(p), IDENTITY2)
        + eff.beta * kron(IDENTITY2, SIGMA_Z, SIGMA_Z)
        + eff.alpha * kron(IDENTITY2, IDENTITY2, SIGMA_Z)
    )


def build_three_qubit_hamiltonian(p: ChainParams, t: float) -> NDArray[np.complex128]:
    """XXZ pair on qubits 1-2, driven Ising pair on qubits 2-3."""
    return three_qubit_static(p) + drive_amplitude(p, t) * drive_operator(3)


def static_hamiltonian(p: ChainParams) -> NDArray[np.complex128]:
    return two_qubit_static(p) if p.n_qubits == 2 else three_qubit_static(p)


def hamiltonian(p: ChainParams, t: float) -> NDArray[np.complex128]:
    if p.n_qubits == 2:
        return build_two_qubit_hamiltonian(p, t)
    return build_three_qubit_hamiltonian(p, t)


def validate_rwa(p: ChainParams) -> list[str]:
    """Warnings for parameters outside the regime where the rotating-wave picture holds.

    Never raises. The ``alpha > varphi`` condition is read as ``m > varphi/pi``:
    the static field on the target must dominate the drive amplitude.
    """
    warnings = []
    varphi = p.angles.varphi
    if not 0.0 <= varphi <= math.pi:
        warnings.append(f"varphi = {varphi:.6g} lies outside [0, pi]")
    if abs(p.k - p.m) <= 1:
        warnings.append(f"|k - m| = {abs(p.k - p.m)} <= 1: drive is not well separated from the idle block")
    if not p.m > varphi / math.pi:
        warnings.append(f"m = {p.m} does not exceed the drive amplitude varphi/pi = {varphi / math.pi:.6g}")
    return warnings
