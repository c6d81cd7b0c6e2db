"""Parameter campaigns: grid-averaged fidelity traces, disorder scans, resonant triples.

All campaigns are deterministic. Grid points are processed in fixed-size
chunks (optionally on several threads; the compiled kernel releases the GIL)
and results are written back by index, so the reduction order never changes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

from barenco_chain.errors import BarencoChainError, ImaginaryCouplingError
from barenco_chain.evolve import DEFAULT_STEPS_PER_GATE, frame_diagonal, propagate_params, steps_for
from barenco_chain.fidelity import fidelity_many, sample_steps
from barenco_chain.model import GATE_TIME, ChainParams, GateAngles
from barenco_chain.targets import barenco

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

CHUNK = 64
DEFAULT_T_FINAL = 1.5 * GATE_TIME
DEFAULT_SAMPLES = 300
DEFAULT_DELTAS = tuple(i / 100 for i in range(-10, 11))


@dataclass(frozen=True)
class AngleGrid:
    varphi_points: tuple[float, ...]
    omega_points: tuple[float, ...]
    phi_points: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.varphi_points) * len(self.omega_points) * len(self.phi_points)

    def triples(self) -> list[GateAngles]:
        """Grid points with ``varphi`` varying slowest and ``phi`` fastest."""
        return [
            GateAngles(vp, om, ph) for vp in self.varphi_points for om in self.omega_points for ph in self.phi_points
        ]

    def as_array(self) -> NDArray[np.float64]:
        return np.array([t.as_tuple() for t in self.triples()])


def angle_grid() -> AngleGrid:
    """11 values of varphi on ``[0, pi]`` and 10 each of omega, phi on ``[0, 2pi)``: 1100 triples."""
    return AngleGrid(
        tuple(math.pi * i / 10 for i in range(11)),
        tuple(2 * math.pi * i / 10 for i in range(10)),
        tuple(2 * math.pi * i / 10 for i in range(10)),
    )


class DisorderMode(str, Enum):
    M_ONLY = "m"
    K_ONLY = "k"
    L_ONLY = "l"
    JOINT = "joint"

    def deltas(self, delta: float) -> tuple[float, float, float]:
        """``(delta_m, delta_k, delta_l)`` for a scan value."""
        return {
            DisorderMode.M_ONLY: (delta, 0.0, 0.0),
            DisorderMode.K_ONLY: (0.0, delta, 0.0),
            DisorderMode.L_ONLY: (0.0, 0.0, delta),
            DisorderMode.JOINT: (delta, delta, delta),
        }[self]


@dataclass(frozen=True)
class DisorderScenario:
    mode: DisorderMode
    delta_values: tuple[float, ...] = DEFAULT_DELTAS


@dataclass(frozen=True)
class SweepResult:
    """Per-grid-point fidelities along one axis (time or disorder offset).

    ``per_point[i, j]`` is the fidelity at ``axis[i]`` for grid triple ``j``;
    ``averages[i]`` is the arithmetic mean of ``per_point[i]``.
    """

    label: str
    axis_name: str
    axis: NDArray[np.float64]
    per_point: NDArray[np.float64]
    averages: NDArray[np.float64]
    triples: NDArray[np.float64]
    max_unitarity_defect: float
    metadata: dict = field(default_factory=dict)

    @property
    def minima(self) -> NDArray[np.float64]:
        return self.per_point.min(axis=1)

    @property
    def maxima(self) -> NDArray[np.float64]:
        return self.per_point.max(axis=1)

    def average_at(self, x: float) -> float:
        return float(self.averages[np.argmin(np.abs(self.axis - x))])


def _chunk_fidelities(
    params: Sequence[ChainParams], dt: float, record: NDArray[np.int64]
) -> tuple[NDArray[np.float64], float]:
    n = params[0].n_qubits
    snaps = propagate_params(params, dt, record)
    frames = frame_diagonal(n, np.array([p.angles.omega for p in params]), record * dt)
    targets = np.stack([barenco(n, p.angles).matrix for p in params])
    fids = fidelity_many(frames[..., :, None] * snaps, targets[:, None])
    gram = np.conj(np.swapaxes(snaps, -1, -2)) @ snaps
    defect = float(np.max(np.abs(gram - np.eye(snaps.shape[-1]))))
    return fids, defect


def _locate_failure(params: Sequence[ChainParams], dt: float, record: NDArray[np.int64], err: Exception) -> Exception:
    for p in params:
        try:
            _chunk_fidelities([p], dt, record)
        except BarencoChainError as single:
            vp, om, ph = p.angles.as_tuple()
            return type(single)(f"{single} [at (varphi, omega, phi) = ({vp:.6g}, {om:.6g}, {ph:.6g})]")
    return err


def grid_fidelities(
    base: ChainParams,
    triples: Sequence[GateAngles],
    dt: float,
    record: NDArray[np.int64],
    threads: int = 1,
) -> tuple[NDArray[np.float64], float]:
    """Fidelity of ``V_N(triple)`` against the propagator, for every triple and recorded step.

    Returns ``(F, max_defect)`` with ``F`` of shape ``(len(record), len(triples))``.
    """
    params = [base.with_angles(a) for a in triples]
    chunks = [params[i : i + CHUNK] for i in range(0, len(params), CHUNK)]

    def run(chunk: list[ChainParams]) -> tuple[NDArray[np.float64], float]:
        try:
            return _chunk_fidelities(chunk, dt, record)
        except BarencoChainError as err:
            raise _locate_failure(chunk, dt, record, err) from err

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    fids = np.concatenate([r[0] for r in results], axis=0).T
    return np.ascontiguousarray(fids), max(r[1] for r in results)


def average_fidelity_trace(
    base: ChainParams,
    t_final: float = DEFAULT_T_FINAL,
    samples: int = DEFAULT_SAMPLES,
    steps_per_gate: int = DEFAULT_STEPS_PER_GATE,
    threads: int = 1,
    grid: AngleGrid | None = None,
) -> SweepResult:
    """Grid-averaged ``<F(t)>``; the angles of ``base`` are ignored, the grid supplies them."""
    grid = grid or angle_grid()
    dt, record = sample_steps(t_final, samples, steps_per_gate)
    fids, defect = grid_fidelities(base, grid.triples(), dt, record, threads)
    meta = base.as_dict() | {"t_final": t_final, "samples": samples, "steps_per_gate": steps_per_gate}
    for key in ("varphi", "omega", "phi"):
        meta.pop(key)
    return SweepResult(
        label=f"{base.n_qubits}-qubit average fidelity",
        axis_name="t",
        axis=record * dt,
        per_point=fids,
        averages=fids.mean(axis=1),
        triples=grid.as_array(),
        max_unitarity_defect=defect,
        metadata=meta,
    )


def default_disorder_base() -> ChainParams:
    return ChainParams(3, 2, 8, l=17)


def disorder_sweep(
    base: ChainParams | None = None,
    scenario: DisorderScenario = DisorderScenario(DisorderMode.JOINT),
    steps_per_gate: int = DEFAULT_STEPS_PER_GATE,
    threads: int = 1,
    grid: AngleGrid | None = None,
    cache: dict | None = None,
) -> SweepResult:
    """Fidelity at the gate time over the angle grid for each disorder offset.

    ``cache`` (keyed by ``(delta_m, delta_k, delta_l)``) lets several scenarios
    share the runs they have in common, e.g. the unperturbed point.
    """
    base = base or default_disorder_base()
    grid = grid or angle_grid()
    cache = {} if cache is None else cache
    perturbed = []
    for delta in scenario.delta_values:
        dm, dk, dl = scenario.mode.deltas(delta)
        p = base.replace(delta_m=dm, delta_k=dk, delta_l=dl)
        try:
            p.effective()
        except ImaginaryCouplingError as err:
            raise ImaginaryCouplingError(f"{err} (mode {scenario.mode.value}, delta = {delta:g})") from err
        perturbed.append(((dm, dk, dl), p))
    n = steps_for(GATE_TIME, steps_per_gate)
    record = np.array([n], dtype=np.int64)
    rows, defects = [], []
    for key, p in perturbed:
        if key not in cache:
            fids, defect = grid_fidelities(p, grid.triples(), GATE_TIME / n, record, threads)
            cache[key] = (fids[0], defect)
        rows.append(cache[key][0])
        defects.append(cache[key][1])
    per_point = np.stack(rows)
    meta = base.as_dict() | {"mode": scenario.mode.value, "steps_per_gate": steps_per_gate}
    for k in ("varphi", "omega", "phi", "delta_m", "delta_k", "delta_l"):
        meta.pop(k)
    return SweepResult(
        label=f"disorder ({scenario.mode.value})",
        axis_name="delta",
        axis=np.array(scenario.delta_values, dtype=np.float64),
        per_point=per_point,
        averages=per_point.mean(axis=1),
        triples=grid.as_array(),
        max_unitarity_defect=max(defects),
        metadata=meta,
    )


def disorder_campaign(
    base: ChainParams | None = None,
    modes: Sequence[DisorderMode] = tuple(DisorderMode),
    delta_values: Sequence[float] = DEFAULT_DELTAS,
    steps_per_gate: int = DEFAULT_STEPS_PER_GATE,
    threads: int = 1,
) -> dict[DisorderMode, SweepResult]:
    """All requested disorder panels, sharing the unperturbed run."""
    cache: dict = {}
    return {
        mode: disorder_sweep(base, DisorderScenario(mode, tuple(delta_values)), steps_per_gate, threads, cache=cache)
        for mode in modes
    }


def delta_j_sensitivity(k: float, l: float, delta_k: float, delta_l: float) -> float:
    """First-order change of ``J/A = sqrt(l^2 - k^2)``: ``(l dl - k dk) / sqrt(l^2 - k^2)``."""
    if l * l <= k * k:
        raise ValueError(f"need l^2 > k^2, got k = {k}, l = {l}")
    return (l * delta_l - k * delta_k) / math.sqrt(l * l - k * k)


def find_resonant_triples(l_max: int) -> list[tuple[int, int, int]]:
    """Integer ``(k, gamma, l)`` with ``k^2 + gamma^2 = l^2``, ``gamma >= 1``, ``1 <= k < l <= l_max``, sorted by ``(l, k)``."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    out = []
    for l in range(2, l_max + 1):
        for k in range(1, l):
            g2 = l * l - k * k
            g = math.isqrt(g2)
            if g >= 1 and g * g == g2:
                out.append((k, g, l))
    return out
