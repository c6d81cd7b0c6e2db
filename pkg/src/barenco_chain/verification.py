"""Built-in acceptance checks, shared by ``barenco-chain verify`` and the test suite.

Each check returns a :class:`CheckResult` carrying the measured numbers, so a
failing check reports how far off it is rather than just that it failed.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from barenco_chain.errors import NotUnitaryError
from barenco_chain.evolve import DEFAULT_STEPS_PER_GATE, h2_input_block, propagate, rwa_discrepancy, scoring_frame
from barenco_chain.experiments import (
    DEFAULT_DELTAS,
    DisorderMode,
    angle_grid,
    disorder_campaign,
    find_resonant_triples,
    grid_fidelities,
)
from barenco_chain.fidelity import fidelity_many, operator_fidelity
from barenco_chain.linalg import expm_i, herm_eig
from barenco_chain.model import CNOT_ANGLES, GATE_TIME, TOFFOLI_ANGLES, ChainParams, GateAngles, build_xxz_hamiltonian
from barenco_chain.targets import cnot, controlled_phase, toffoli

TWO_QUBIT = ChainParams(2, 2, 8)
THREE_QUBIT = ChainParams(3, 2, 8, l=17)
# the disorder scan is converged to ~1e-6 in <F> at this resolution
DISORDER_STEPS_PER_GATE = 1024


@dataclass(frozen=True)
class CheckResult:
    criterion: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion}. {self.name}: {self.detail}"


@dataclass
class Verifier:
    """Runs the checks, caching the grid propagations that several of them share."""

    steps_per_gate: int = DEFAULT_STEPS_PER_GATE
    disorder_steps_per_gate: int = DISORDER_STEPS_PER_GATE
    threads: int = 1
    _grid: dict = field(default_factory=dict, repr=False)

    def grid_at_gate_time(self, base: ChainParams) -> tuple[np.ndarray, float]:
        if base not in self._grid:
            n = self.steps_per_gate
            fids, defect = grid_fidelities(
                base, angle_grid().triples(), GATE_TIME / n, np.array([n]), self.threads
            )
            self._grid[base] = (fids[0], defect)
        return self._grid[base]

    def _average(self, criterion: str, base: ChainParams, label: str) -> CheckResult:
        fids, _ = self.grid_at_gate_time(base)
        mean = float(fids.mean())
        return CheckResult(
            criterion,
            f"{label} grid-average fidelity at t_g",
            mean > 0.998 and mean >= 0.99,
            f"<F(pi)> = {mean:.8f} (need > 0.998, floor 0.99; min over grid {fids.min():.6f})",
        )

    def check_1(self) -> CheckResult:
        return self._average("1", TWO_QUBIT, "two-qubit (m, k) = (2, 8)")

    def check_2(self) -> CheckResult:
        return self._average("2", THREE_QUBIT, "three-qubit (m, k, l) = (2, 8, 17)")

    def check_3(self) -> CheckResult:
        panels = disorder_campaign(
            THREE_QUBIT, delta_values=DEFAULT_DELTAS, steps_per_gate=self.disorder_steps_per_gate, threads=self.threads
        )
        floor_ok, worst_floor = True, 1.0
        flat_ok, worst_shift, worst_at = True, 0.0, ""
        for mode, res in panels.items():
            base = res.averages[np.flatnonzero(np.isclose(res.axis, 0.0))[0]]
            for delta, avg in zip(res.axis, res.averages):
                if abs(delta) <= 0.01 + 1e-12:
                    worst_floor = min(worst_floor, avg)
                    floor_ok &= bool(avg > 0.99)
                if mode is not DisorderMode.JOINT and abs(delta) <= 0.03 + 1e-12:
                    shift = abs(avg - base)
                    flat_ok &= bool(shift <= 1e-3)
                    if shift > worst_shift:
                        worst_shift, worst_at = shift, f"{mode.value}, delta = {delta:+.2f}"
        return CheckResult(
            "3",
            "disorder robustness",
            floor_ok and flat_ok,
            f"(a) min mean F for |delta| <= 0.01 = {worst_floor:.6f} [{'ok' if floor_ok else 'below 0.99'}]; "
            f"(b) max |mean F - baseline| for single-parameter |delta| <= 0.03 = {worst_shift:.3e} at {worst_at} "
            f"[{'ok' if flat_ok else 'above 1e-3'}]",
        )

    def check_4(self) -> CheckResult:
        n = self.steps_per_gate
        p2 = TWO_QUBIT.with_angles(CNOT_ANGLES)
        p3 = THREE_QUBIT.with_angles(TOFFOLI_ANGLES)
        f2 = operator_fidelity(scoring_frame(p2, GATE_TIME) @ propagate(p2, GATE_TIME, n).u, cnot().matrix)
        f3 = operator_fidelity(scoring_frame(p3, GATE_TIME) @ propagate(p3, GATE_TIME, n).u, toffoli().matrix)
        return CheckResult(
            "4",
            "CNOT and Toffoli calibration points",
            f2 > 0.998 and f3 > 0.998,
            f"F(CNOT) = {f2:.6f}, F(Toffoli) = {f3:.6f} (need > 0.998 each)",
        )

    def check_5(self) -> CheckResult:
        near = rwa_discrepancy(TWO_QUBIT.with_angles(CNOT_ANGLES), GATE_TIME, self.steps_per_gate)
        far = rwa_discrepancy(ChainParams(2, 2, 14, angles=CNOT_ANGLES), GATE_TIME, self.steps_per_gate)
        half = rwa_discrepancy(TWO_QUBIT.with_angles(GateAngles(math.pi / 2, math.pi / 2, 0.0)), GATE_TIME)
        return CheckResult(
            "5",
            "rotating-wave prediction vs numerics",
            near < 5e-3 and far < near,
            f"1 - F at CNOT point, |k - m| = 6: {near:.4e} (need < 5e-3); |k - m| = 12: {far:.4e} "
            f"({'decreases' if far < near else 'does not decrease'}); varphi = pi/2, |k - m| = 6: {half:.3e}",
        )

    def check_6(self) -> CheckResult:
        p = THREE_QUBIT
        h = h2_input_block(p)
        raw = herm_eig(h).eigenvalues
        shift = np.trace(h).real / 4
        centered = herm_eig(h - shift * np.eye(4)).eigenvalues
        eff = p.effective()
        r = math.hypot(eff.j, eff.beta)
        expected = np.sort([eff.alpha + r, eff.alpha - r, -eff.alpha + r, -eff.alpha - r])
        err_centered = float(np.max(np.abs(centered - expected)))
        err_raw = float(np.max(np.abs(raw - (expected - eff.j))))
        ok = err_centered <= 1e-10 and err_raw <= 1e-10 and np.allclose(expected, [-19, -15, 15, 19], atol=0)
        fmt = lambda xs: "[" + ", ".join(f"{x + 0.0:.10f}".rstrip("0").rstrip(".") for x in np.round(xs, 10)) + "]"  # noqa: E731
        return CheckResult(
            "6",
            "four-level block eigenvalues",
            bool(ok),
            f"traceless part: {fmt(centered)} vs [-19, -15, 15, 19], err {err_centered:.1e}; "
            f"as printed (diagonal shifted by -J = {-eff.j:g}): {fmt(raw)}, err {err_raw:.1e}",
        )

    def check_7(self) -> CheckResult:
        p = ChainParams(2, 2, 8, gamma=15, angles=GateAngles(0.0, math.pi / 2, 0.0))
        u = expm_i(build_xxz_hamiltonian(p), GATE_TIME)
        infid = 1.0 - operator_fidelity(u, controlled_phase(math.pi / 2).matrix)
        return CheckResult("7", "XXZ controlled phase", infid < 1e-6, f"1 - F(U_xxz(pi), G(pi/2)) = {infid:.3e}")

    def check_8(self) -> CheckResult:
        defects = [self.grid_at_gate_time(TWO_QUBIT)[1], self.grid_at_gate_time(THREE_QUBIT)[1]]
        defect = max(defects)
        ratio = order_ratio(THREE_QUBIT.with_angles(TOFFOLI_ANGLES))
        lo, hi, fired = fidelity_bound_sweep()
        ok = defect <= 1e-9 and 3.2 <= ratio <= 4.8 and min(lo, hi) >= -1e-12 and fired
        return CheckResult(
            "8",
            "numerics suite",
            ok,
            f"max unitarity defect {defect:.2e} over 2200 grid propagators (<= 1e-9); order ratio {ratio:.3f} "
            f"(in [3.2, 4.8]); bound margins over 1000 pairs: lower {lo:.2e}, upper {hi:.2e}; guard fired: {fired}",
        )

    def check_9(self) -> CheckResult:
        got = find_resonant_triples(100)
        oracle = brute_force_triples(100)
        required = [(8, 15, 17), (3, 4, 5), (5, 12, 13), (20, 21, 29)]
        missing = [t for t in required if t not in got]
        return CheckResult(
            "9",
            "resonant triples up to l = 100",
            got == oracle and not missing,
            f"{len(got)} triples, oracle {len(oracle)}, equal: {got == oracle}; missing required: {missing or 'none'}",
        )

    def checks(self) -> dict[str, Callable[[], CheckResult]]:
        return {str(i): getattr(self, f"check_{i}") for i in range(1, 10)}

    def run(self, selected: list[str] | None = None) -> list[CheckResult]:
        table = self.checks()
        return [table[c]() for c in (selected or list(table))]


def order_ratio(p: ChainParams, t: float = GATE_TIME, steps: int = 256) -> float:
    """``||U_N - U_2N|| / ||U_2N - U_4N||``: about 4 for a second-order integrator."""
    u1, u2, u4 = (propagate(p, t, steps * f).u for f in (1, 2, 4))
    return float(np.linalg.norm(u1 - u2) / np.linalg.norm(u2 - u4))


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def fidelity_bound_sweep(pairs: int = 1000, seed: int = 20240611) -> tuple[float, float, bool]:
    """Smallest margins ``F - 1/(D+1)`` and ``1 - F`` over seeded random pairs, and whether the guard fires."""
    rng = np.random.default_rng(seed)
    lo = hi = math.inf
    for i in range(pairs):
        d = (2, 4, 8)[i % 3]
        f = float(fidelity_many(haar_unitary(rng, d), haar_unitary(rng, d)))
        lo = min(lo, f - 1.0 / (d + 1))
        hi = min(hi, 1.0 - f)
    try:
        operator_fidelity(2.0 * np.eye(4), np.eye(4))
        fired = False
    except NotUnitaryError:
        fired = True
    return lo, hi, fired


def brute_force_triples(l_max: int) -> list[tuple[int, int, int]]:
    found = set()
    for k in range(1, l_max + 1):
        for g in range(1, l_max + 1):
            for l in range(k + 1, l_max + 1):
                if k * k + g * g == l * l:
                    found.add((k, g, l))
    return sorted(found, key=lambda t: (t[2], t[0]))
