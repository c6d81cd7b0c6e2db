"""Command-line interface: ``barenco-chain <command> [options]``.

Commands: ``simulate``, ``trace``, ``sweep``, ``disorder``, ``triples``, ``verify``.

Settings are resolved from, in increasing priority: built-in defaults, the
header of a previous output file (``--from-header``), a ``key=value`` config
file (``--config``) and command-line flags. Every output file starts with the
fully resolved settings as ``# key=value`` comment lines, so it can be re-run
from its own header.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from barenco_chain.errors import (
    BudgetExceededError,
    DivisionByZeroError,
    ImaginaryCouplingError,
    NoConvergenceError,
    NotUnitaryError,
)
from barenco_chain.evolve import DEFAULT_STEPS_PER_GATE, propagate, scoring_frame, steps_for
from barenco_chain.experiments import (
    DEFAULT_DELTAS,
    DEFAULT_SAMPLES,
    DisorderMode,
    average_fidelity_trace,
    disorder_campaign,
    find_resonant_triples,
)
from barenco_chain.fidelity import fidelity_trace, operator_fidelity
from barenco_chain.model import GATE_TIME, ChainParams, GateAngles, validate_rwa
from barenco_chain.targets import TargetGate, barenco, cnot, toffoli
from barenco_chain.verification import DISORDER_STEPS_PER_GATE, Verifier

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

COMMANDS = ("simulate", "trace", "sweep", "disorder", "triples", "verify")
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
NUMERIC_ERRORS = (NotUnitaryError, NoConvergenceError, ImaginaryCouplingError, BudgetExceededError, DivisionByZeroError)

_ANGLE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?$")


class ConfigError(ValueError):
    """Invalid or unknown setting (exit code 2)."""


def parse_angle(text: str) -> float:
    """Radians from ``"pi"``, ``"pi/2"``, ``"-3pi/4"``, ``"0.3pi"``, ``"2*pi"`` or a plain number."""
    s = text.strip().lower()
    match = _ANGLE.match(s)
    if match:
        coef = match.group(1)
        scale = float(coef) if coef not in (None, "+", "-") else (-1.0 if coef == "-" else 1.0)
        den = float(match.group(2)) if match.group(2) else 1.0
        if den == 0.0:
            raise ConfigError(f"division by zero in angle {text!r}")
        return scale * math.pi / den
    if s.startswith("-pi") or s.startswith("+pi"):
        return (-1.0 if s[0] == "-" else 1.0) * parse_angle(s[1:])
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def _optional(conv: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(text: str) -> Any:
        return None if text.strip().lower() in ("", "none") else conv(text)

    return parse


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ConfigError(f"{text!r} is not one of {', '.join(options)}")
        return text

    return parse


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(_float(x) for x in text.split(",") if x.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


# key -> parser; these are exactly the settings accepted in config files and headers
PARSERS: dict[str, Callable[[str], Any]] = {
    "n": _int,
    "m": _int,
    "k": _int,
    "l": _optional(_int),
    "gamma": _optional(_float),
    "varphi": parse_angle,
    "omega": parse_angle,
    "phi": parse_angle,
    "target": _choice("barenco", "cnot", "toffoli"),
    "steps": _int,
    "samples": _int,
    "t_final": _optional(parse_angle),
    "tol": _float,
    "threads": _int,
    "l_max": _int,
    "mode": _choice("all", *(m.value for m in DisorderMode)),
    "deltas": _float_list,
    "checks": _str_list,
    "disorder_steps": _int,
    "format": _choice("csv", "json"),
    "out": _optional(str),
}


_CHAIN = ("n", "m", "k", "l", "gamma")
_ANGLES = ("varphi", "omega", "phi")
# settings that influence each command's output; the worker count never does
HEADER_KEYS = {
    "simulate": _CHAIN + _ANGLES + ("target", "steps", "t_final", "tol"),
    "trace": _CHAIN + _ANGLES + ("target", "steps", "samples", "t_final"),
    "sweep": _CHAIN + ("steps", "samples", "t_final"),
    "disorder": _CHAIN + ("steps", "mode", "deltas"),
    "triples": ("l_max",),
    "verify": ("steps", "disorder_steps", "checks"),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one command."""

    command: str
    n: int = 2
    m: int = 2
    k: int = 8
    l: int | None = None
    gamma: float | None = None
    varphi: float = math.pi
    omega: float = math.pi / 2
    phi: float = 0.0
    target: str = "barenco"
    steps: int = DEFAULT_STEPS_PER_GATE
    samples: int = DEFAULT_SAMPLES
    t_final: float | None = None
    tol: float = 1e-4
    threads: int = 1
    l_max: int = 100
    mode: str = "all"
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    checks: tuple[str, ...] = ()
    disorder_steps: int = DISORDER_STEPS_PER_GATE
    format: str = "csv"
    out: str | None = None

    def resolved(self) -> RunConfig:
        """Fill in command-dependent defaults and check ranges."""
        cfg = self
        if cfg.command not in COMMANDS:
            raise ConfigError(f"unknown command {cfg.command!r}")
        if cfg.n == 3 and cfg.l is None and cfg.gamma is None:
            cfg = dataclasses.replace(cfg, l=17)
        if cfg.t_final is None:
            cfg = dataclasses.replace(cfg, t_final=GATE_TIME if cfg.command == "simulate" else 1.5 * GATE_TIME)
        for name in ("steps", "samples", "threads", "l_max", "disorder_steps"):
            if getattr(cfg, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if cfg.t_final < 0:
            raise ConfigError("t_final must be >= 0")
        if cfg.target == "cnot" and cfg.n != 2 or cfg.target == "toffoli" and cfg.n != 3:
            raise ConfigError(f"target {cfg.target} does not fit n = {cfg.n}")
        unknown = set(cfg.checks) - {str(i) for i in range(1, 10)}
        if unknown:
            raise ConfigError(f"unknown checks {sorted(unknown)}; valid are 1..9")
        if cfg.tol <= 0:
            raise ConfigError("tol must be positive")
        return dataclasses.replace(cfg, gamma=cfg.params().gamma)

    def params(self) -> ChainParams:
        try:
            return ChainParams(
                self.n, self.m, self.k, l=self.l, gamma=self.gamma, angles=GateAngles(self.varphi, self.omega, self.phi)
            )
        except ImaginaryCouplingError:
            raise
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def header_items(self) -> list[tuple[str, str]]:
        """``key=value`` pairs that reproduce this run's output."""
        keys = ("command",) + HEADER_KEYS[self.command] + ("format",)
        return [(key, _format_setting(getattr(self, key))) for key in keys]


def _format_setting(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ",".join(_format_setting(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_key_values(lines: Sequence[str], source: str, strict: bool = True) -> dict[str, Any]:
    """Parse ``key=value`` lines. Unknown keys are an error unless ``strict`` is false."""
    out: dict[str, Any] = {}
    for number, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "command":
            out[key] = value
        elif key in PARSERS:
            out[key] = PARSERS[key](value)
        elif strict:
            raise ConfigError(f"{source}:{number}: unknown key {key!r}")
    return out


def read_config_file(path: str) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_key_values(text.splitlines(), path)


def read_header(path: str) -> dict[str, Any]:
    """Settings from the ``# key=value`` comment block at the top of an output file."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    lines = []
    for raw in text.splitlines():
        if not raw.startswith("#"):
            break
        body = raw[1:].strip()
        if re.match(r"^[a-z_]+=", body):
            lines.append(body)
    if not lines:
        raise ConfigError(f"{path} has no settings header")
    return parse_key_values(lines, path)


# -- output ---------------------------------------------------------------------


def _num(x: float) -> str:
    return f"{float(x):.17g}"


def _header(cfg: RunConfig, results: Sequence[tuple[str, str]] = ()) -> str:
    lines = [f"# barenco-chain {cfg.command}"]
    lines += [f"# {k}={v}" for k, v in cfg.header_items()]
    lines += [f"# {k}: {v}" for k, v in results]
    return "\n".join(lines) + "\n"


def _csv(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[Any]], results=()) -> str:
    buf = io.StringIO()
    buf.write(_header(cfg, results))
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_num(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _json(cfg: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[Any]], **extra: Any) -> str:
    def plain(v: Any) -> Any:
        if isinstance(v, (np.floating, float)):
            return float(v)
        if isinstance(v, np.integer):
            return int(v)
        return v

    doc = {
        "metadata": {k: getattr(cfg, k) for k, _ in cfg.header_items()},
        "records": [{c: plain(v) for c, v in zip(columns, row)} for row in rows],
    }
    doc.update(extra)
    return json.dumps(doc, indent=1) + "\n"


def _emit(cfg: RunConfig, text: str, path: str | None = None) -> None:
    path = path if path is not None else cfg.out
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _table(cfg: RunConfig, columns, rows, results=(), **extra) -> str:
    if cfg.format == "json":
        return _json(cfg, columns, rows, **{k: v for k, v in results} | extra)
    return _csv(cfg, columns, rows, results)


# -- commands -------------------------------------------------------------------


def _target(cfg: RunConfig, p: ChainParams) -> TargetGate:
    if cfg.target == "cnot":
        return cnot()
    if cfg.target == "toffoli":
        return toffoli()
    return barenco(p.n_qubits, p.angles)


def run_simulate(cfg: RunConfig) -> int:
    p = cfg.params()
    target = _target(cfg, p)
    n = steps_for(cfg.t_final, cfg.steps)
    res = propagate(p, cfg.t_final, n)
    change = float(np.max(np.abs(res.u - propagate(p, cfg.t_final, max(1, n // 2)).u)))
    if change > cfg.tol:
        print(f"warning: halving the step count changes U by {change:.2e} > tol = {cfg.tol:g}", file=sys.stderr)
    u = scoring_frame(p, cfg.t_final) @ res.u
    fid = operator_fidelity(u, target.matrix)
    rows = [
        (i, j, u[i, j].real, u[i, j].imag, abs(u[i, j]), math.atan2(u[i, j].imag, u[i, j].real))
        for i in range(u.shape[0])
        for j in range(u.shape[1])
    ]
    results = [("target", target.label), ("fidelity", _num(fid)), ("unitarity_defect", _num(res.unitarity_defect))]
    results.append(("step_change", _num(change)))
    _emit(cfg, _table(cfg, ("row", "col", "re", "im", "abs", "arg"), rows, results))
    if cfg.out is not None:
        print(f"fidelity vs {target.label}: {fid:.10f}")
    return 0


def run_trace(cfg: RunConfig) -> int:
    p = cfg.params()
    tr = fidelity_trace(p, _target(cfg, p), cfg.t_final, cfg.samples, cfg.steps)
    _emit(cfg, _table(cfg, ("t", "F"), list(zip(tr.times, tr.values)), [("target", tr.label)]))
    return 0


def run_sweep(cfg: RunConfig) -> int:
    res = average_fidelity_trace(cfg.params(), cfg.t_final, cfg.samples, cfg.steps, cfg.threads)
    rows = list(zip(res.axis, res.averages, res.minima, res.maxima))
    results = [("max_unitarity_defect", _num(res.max_unitarity_defect))]
    _emit(cfg, _table(cfg, ("t", "mean_F", "min_F", "max_F"), rows, results))
    return 0


def means_path(out: str) -> str:
    path = Path(out)
    return str(path.with_name(f"{path.stem}_means{path.suffix or '.csv'}"))


def run_disorder(cfg: RunConfig) -> int:
    modes = list(DisorderMode) if cfg.mode == "all" else [DisorderMode(cfg.mode)]
    panels = disorder_campaign(cfg.params(), modes, cfg.deltas, cfg.steps, cfg.threads)
    point_rows, mean_rows = [], []
    for mode, res in panels.items():
        for i, delta in enumerate(res.axis):
            mean_rows.append((mode.value, delta, res.averages[i]))
            for j, (vp, om, ph) in enumerate(res.triples):
                point_rows.append((mode.value, delta, j, vp, om, ph, res.per_point[i, j]))
    defect = max(r.max_unitarity_defect for r in panels.values())
    results = [("max_unitarity_defect", _num(defect))]
    mean_cols = ("scenario", "delta", "mean_F")
    point_cols = ("scenario", "delta", "triple_index", "varphi", "omega", "phi", "F")
    if cfg.format == "json":
        means = [dict(zip(mean_cols, (s, float(d), float(f)))) for s, d, f in mean_rows]
        _emit(cfg, _table(cfg, point_cols, point_rows, results, means=means))
        return 0
    if cfg.out is None:
        # the per-point table is large; without an output path only the means are printed
        _emit(cfg, _csv(cfg, mean_cols, mean_rows, results))
        return 0
    _emit(cfg, _csv(cfg, point_cols, point_rows, results))
    _emit(cfg, _csv(cfg, mean_cols, mean_rows, results), means_path(cfg.out))
    return 0


def run_triples(cfg: RunConfig) -> int:
    rows = find_resonant_triples(cfg.l_max)
    _emit(cfg, _table(cfg, ("k", "gamma", "l"), rows))
    return 0


def run_verify(cfg: RunConfig) -> int:
    verifier = Verifier(cfg.steps, cfg.disorder_steps, cfg.threads)
    results = []
    for check in verifier.run(list(cfg.checks) or None):
        print(check.line(), flush=True)
        results.append(check)
    return 0 if all(r.passed for r in results) else EXIT_VERIFY_FAILED


RUNNERS = {
    "simulate": run_simulate,
    "trace": run_trace,
    "sweep": run_sweep,
    "disorder": run_disorder,
    "triples": run_triples,
    "verify": run_verify,
}


# -- argument handling ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    s = argparse.SUPPRESS
    common.add_argument("--config", metavar="PATH", default=s, help="key=value settings file")
    common.add_argument("--from-header", metavar="PATH", default=s, help="re-run with the settings of an output file")
    g = common.add_argument_group("chain")
    g.add_argument("--n", type=str, default=s, help="number of qubits, 2 or 3 (disorder defaults to 3)")
    g.add_argument("--m", type=str, default=s, help="alpha / A (integer, default 2)")
    g.add_argument("--k", type=str, default=s, help="beta / A (integer, default 8)")
    g.add_argument("--l", type=str, default=s, help="resonance index for three qubits (default 17)")
    g.add_argument("--gamma", type=str, default=s, help="J / A; defaults to sqrt(l^2 - k^2)")
    g.add_argument("--varphi", type=str, default=s, help="rotation angle, e.g. pi or 0.3pi (default pi)")
    g.add_argument("--omega", type=str, default=s, help="phase angle (default pi/2)")
    g.add_argument("--phi", type=str, default=s, help="axis angle (default 0)")
    g.add_argument("--target", type=str, default=s, help="barenco (default), cnot or toffoli")
    g = common.add_argument_group("numerics")
    g.add_argument("--steps", type=str, default=s, help=f"midpoint steps per gate time (default {DEFAULT_STEPS_PER_GATE})")
    g.add_argument("--samples", type=str, default=s, help=f"trace samples (default {DEFAULT_SAMPLES})")
    g.add_argument("--t-final", type=str, default=s, help="end time in hbar/A (default 1.5pi; pi for simulate)")
    g.add_argument("--tol", type=str, default=s, help="simulate: warn if halving the steps changes U by more than this (default 1e-4)")
    g.add_argument("--threads", type=str, default=s, help="worker threads for grid sweeps (default 1)")
    g = common.add_argument_group("campaigns")
    g.add_argument("--l-max", type=str, default=s, help="largest l for triples (default 100)")
    g.add_argument("--mode", type=str, default=s, help="disorder mode: m, k, l, joint or all (default all)")
    g.add_argument("--deltas", type=str, default=s, help="comma-separated disorder offsets (default -0.10..0.10)")
    g.add_argument("--checks", type=str, default=s, help="comma-separated acceptance checks to run (default all)")
    g.add_argument("--disorder-steps", type=str, default=s, help="steps per gate for the disorder check")
    g = common.add_argument_group("output")
    g.add_argument("--format", type=str, default=s, help="csv (default) or json")
    g.add_argument("--out", type=str, default=s, help="output path (default stdout)")

    parser = _Parser(prog="barenco-chain", description="Driven spin-chain Barenco gate simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "simulate": "propagate one configuration and report its fidelity",
        "trace": "fidelity versus time for one configuration",
        "sweep": "grid-averaged fidelity versus time",
        "disorder": "grid-averaged gate fidelity under perturbed couplings",
        "triples": "list resonant (k, gamma, l) triples",
        "verify": "run the built-in acceptance checks",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name], description=helps[name])
    return parser


def resolve_config(argv: Sequence[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    settings: dict[str, Any] = {"n": 3} if command == "disorder" else {}
    for source, reader in (("from_header", read_header), ("config", read_config_file)):
        path = ns.pop(source, None)
        if path is not None:
            loaded = reader(path)
            if loaded.pop("command", command) != command and source == "config":
                raise ConfigError(f"{path} is for a different command")
            settings.update(loaded)
    for key, text in ns.items():
        settings[key] = PARSERS[key](text)
    return RunConfig(command, **settings).resolved()


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = resolve_config(argv)
        if cfg.command in ("simulate", "trace", "sweep", "disorder"):
            for warning in validate_rwa(cfg.params()):
                print(f"warning: {warning}", file=sys.stderr)
        return RUNNERS[cfg.command](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERIC_ERRORS as err:
        print(f"numeric error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
