"""Declarative parameter sweeps over the interferometer model.

A sweep is described by a small YAML document (grammar below), validated
into a :class:`SweepSpec`, evaluated over the full parameter grid by
:func:`run_sweep`, and serialized by :func:`emit`.  Output is deterministic:
the same configuration produces byte-identical tables regardless of the
worker count, and re-parsing an emitted CSV recovers every float exactly.

Configuration grammar (all keys shown; sections marked per-experiment are
rejected when the chosen experiment does not use them)::

    experiment: sensitivity        # signal | sensitivity | sensitivity_vs_N
                                   # | fwhm_vs_L | qcrb | diagnostics
                                   # | wigner | joint_distribution
                                   # | photon_vs_r | entropy_vs_N
    states:                        # non-empty list
      - name: PSA11                # TMSV | PA | PS | PAS | PSA + order digits
        r: 1.096                   # exactly one of r / target_N ...
        # target_N: 5.0            # ... except *_vs_N / photon_vs_r, which
        # psi: 0.0                 #     forbid both (the grid supplies it)
    theta_grid: {start: -0.4, stop: 0.4, count: 801}   # or [0.007, ...]
    L_list: [1, 3]                 # topological charges (default [1])
    T_a: 1.0                       # scalar or list; two lists are paired
    T_b: 1.0                       #   element-wise, not crossed
    bias_mode: GEARED              # or EXTERNAL
    numeric:
      leak_tol: 1.0e-9
      cutoff_cap: 64
      fd_step: null                # non-null: central differences instead of
                                   # the analytic fringe derivative
    output:
      path: out/table.csv
      format: csv                  # or json
    n_grid: [2, 4, 6]              # sensitivity_vs_N / entropy_vs_N / qcrb
    r_grid: {start: 0.0, stop: 1.2, count: 61}         # photon_vs_r
    wigner: {extent: 5.5, points: 81, mode: a}         # wigner only
    fock_window: 24                # joint_distribution only

``T_a``/``T_b`` pairing: giving both as lists of equal length produces that
list of loss splits (a scalar on one side broadcasts).  This matches how
unbalanced-loss panels are specified and keeps the grid size linear in the
number of splits.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
import yaml

from . import closed_forms
from .characterization import (
    WignerGridSpec,
    entropy,
    joint_distribution,
    wigner,
)
from .errors import (
    ConfigError,
    DegenerateState,
    DerivativeVanished,
    IoError,
    SimulationError,
    ZeroInformation,
)
from .fock import Mode, embed, reduced_density
from .interferometer import (
    BiasMode,
    InterferometerConfig,
    beam_splitter,
    oam_phase,
)
from .measures import (
    fwhm,
    mean_photon,
    mean_photon_of_spec,
    invert_mean_photon,
    parity_fringe,
    qfi,
)
from .states import (
    OperatorConvention,
    StateSpec,
    build_state,
    choose_cutoff,
)

__all__ = [
    "Experiment",
    "StateRequest",
    "SweepSpec",
    "ResultTable",
    "parse_config",
    "run_sweep",
    "emit",
]

TOOL_VERSION = "0.1.0"


class Experiment(str, Enum):
    SIGNAL = "signal"
    SENSITIVITY = "sensitivity"
    SENSITIVITY_VS_N = "sensitivity_vs_N"
    FWHM_VS_L = "fwhm_vs_L"
    QCRB = "qcrb"
    DIAGNOSTICS = "diagnostics"
    WIGNER = "wigner"
    JOINT_DISTRIBUTION = "joint_distribution"
    PHOTON_VS_R = "photon_vs_r"
    ENTROPY_VS_N = "entropy_vs_N"


# Which optional sections each experiment consumes.  Sections an experiment
# does not consume are rejected, so a stray key never silently does nothing.
_USES_THETA = {
    Experiment.SIGNAL,
    Experiment.SENSITIVITY,
    Experiment.SENSITIVITY_VS_N,
    Experiment.FWHM_VS_L,
    Experiment.QCRB,
}
_USES_N_GRID = {
    Experiment.SENSITIVITY_VS_N,
    Experiment.ENTROPY_VS_N,
    Experiment.QCRB,
}
_USES_R_GRID = {Experiment.PHOTON_VS_R}
_USES_LOSS = {
    Experiment.SIGNAL,
    Experiment.SENSITIVITY,
    Experiment.SENSITIVITY_VS_N,
    Experiment.FWHM_VS_L,
}
_USES_L = _USES_LOSS | {Experiment.QCRB, Experiment.WIGNER}
_GRID_SUPPLIES_STATE_SIZE = _USES_N_GRID | _USES_R_GRID

_WIGNER_MODES = ("a", "b", "after_bs1_a")


@dataclass(frozen=True)
class StateRequest:
    """One requested input state; ``r`` may be fixed or solved from a target
    mean photon number."""

    name: str
    r: float | None = None
    target_N: float | None = None
    psi: float = 0.0

    def canonical(self) -> dict:
        return {
            "name": self.name,
            "r": self.r,
            "target_N": self.target_N,
            "psi": self.psi,
        }


@dataclass(frozen=True)
class WignerSection:
    extent: float | None = None
    points: int | None = None
    mode: str = "a"

    def canonical(self) -> dict:
        return {"extent": self.extent, "points": self.points, "mode": self.mode}


@dataclass(frozen=True)
class SweepSpec:
    """Fully validated sweep description."""

    experiment: Experiment
    states: tuple[StateRequest, ...]
    theta: tuple[float, ...] | None
    L_list: tuple[int, ...]
    t_pairs: tuple[tuple[float, float], ...]
    bias_mode: BiasMode
    leak_tol: float
    cutoff_cap: int
    fd_step: float | None
    n_grid: tuple[float, ...] | None
    r_grid: tuple[float, ...] | None
    wigner: WignerSection | None
    fock_window: int | None
    output_path: str | None
    output_format: str

    def canonical(self) -> dict:
        """Plain, ordered dict used for hashing and the metadata echo."""
        return {
            "experiment": self.experiment.value,
            "states": [s.canonical() for s in self.states],
            "theta": list(self.theta) if self.theta is not None else None,
            "L_list": list(self.L_list),
            "t_pairs": [list(p) for p in self.t_pairs],
            "bias_mode": self.bias_mode.value,
            "leak_tol": self.leak_tol,
            "cutoff_cap": self.cutoff_cap,
            "fd_step": self.fd_step,
            "n_grid": list(self.n_grid) if self.n_grid is not None else None,
            "r_grid": list(self.r_grid) if self.r_grid is not None else None,
            "wigner": self.wigner.canonical() if self.wigner else None,
            "fock_window": self.fock_window,
            "output_format": self.output_format,
        }

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def lossy(self) -> bool:
        return any(pair != (1.0, 1.0) for pair in self.t_pairs)


@dataclass
class ResultTable:
    """Rectangular sweep output plus the reproducibility metadata."""

    header: tuple[str, ...]
    rows: list[tuple]
    metadata: dict


# ---------------------------------------------------------------------------
# configuration parsing


def _fail(path: str, reason: str) -> None:
    raise ConfigError(f"{path}: {reason}")


def _mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        _fail(path, "expected a mapping")
    return node


def _check_keys(node: dict, path: str, allowed: Iterable[str]) -> None:
    for key in node:
        if key not in allowed:
            _fail(f"{path}/{key}", "unknown key")


def _finite(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "expected a number")
    out = float(value)
    if not math.isfinite(out):
        _fail(path, "must be finite")
    return out


def _bounded(value, path: str, lo: float, hi: float) -> float:
    out = _finite(value, path)
    if not lo <= out <= hi:
        _fail(path, f"must lie in [{lo:g}, {hi:g}]")
    return out


def _positive_int(value, path: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    if value < minimum:
        _fail(path, f"must be >= {minimum}")
    return value


def _grid(node, path: str) -> tuple[float, ...]:
    """A grid is either {start, stop, count} or an explicit list."""
    if isinstance(node, dict):
        _check_keys(node, path, ("start", "stop", "count"))
        for key in ("start", "stop", "count"):
            if key not in node:
                _fail(f"{path}/{key}", "required")
        start = _finite(node["start"], f"{path}/start")
        stop = _finite(node["stop"], f"{path}/stop")
        count = _positive_int(node["count"], f"{path}/count")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    if isinstance(node, list):
        if not node:
            _fail(path, "grid must be non-empty")
        return tuple(_finite(v, f"{path}/{i}") for i, v in enumerate(node))
    _fail(path, "expected {start, stop, count} or a list of numbers")
    raise AssertionError  # unreachable


def _parse_state(node, path: str, sized_by_grid: bool) -> StateRequest:
    node = _mapping(node, path)
    _check_keys(node, path, ("name", "r", "target_N", "psi"))
    if "name" not in node:
        _fail(f"{path}/name", "required")
    name = node["name"]
    if not isinstance(name, str):
        _fail(f"{path}/name", "expected a string")
    try:
        StateSpec.from_name(name, 0.5)
    except ValueError as exc:
        _fail(f"{path}/name", str(exc))
    has_r = "r" in node and node["r"] is not None
    has_n = "target_N" in node and node["target_N"] is not None
    if sized_by_grid:
        if has_r or has_n:
            _fail(path, "r/target_N are supplied by the grid for this experiment")
    elif has_r == has_n:
        _fail(path, "exactly one of r / target_N is required")
    r = _bounded(node["r"], f"{path}/r", 0.0, 10.0) if has_r else None
    target = None
    if has_n:
        target = _finite(node["target_N"], f"{path}/target_N")
        if target < 0:
            _fail(f"{path}/target_N", "must be >= 0")
    psi = _finite(node.get("psi", 0.0), f"{path}/psi")
    return StateRequest(name=name, r=r, target_N=target, psi=psi)


def _parse_t(node, path: str) -> tuple[float, ...]:
    if isinstance(node, list):
        if not node:
            _fail(path, "list must be non-empty")
        return tuple(_bounded(v, f"{path}/{i}", 0.0, 1.0) for i, v in enumerate(node))
    return (_bounded(node, path, 0.0, 1.0),)


def _pair_t(ta: tuple[float, ...], tb: tuple[float, ...]) -> tuple[tuple[float, float], ...]:
    if len(ta) == 1 and len(tb) > 1:
        ta = ta * len(tb)
    if len(tb) == 1 and len(ta) > 1:
        tb = tb * len(ta)
    if len(ta) != len(tb):
        _fail("T_a", f"paired lists must have equal length ({len(ta)} vs {len(tb)})")
    return tuple(zip(ta, tb))


_TOP_KEYS = (
    "experiment",
    "states",
    "theta_grid",
    "L_list",
    "T_a",
    "T_b",
    "bias_mode",
    "numeric",
    "output",
    "n_grid",
    "r_grid",
    "wigner",
    "fock_window",
)


def parse_config(text: str) -> SweepSpec:
    """Validate a YAML sweep configuration into a :class:`SweepSpec`.

    Every violation is reported as :class:`ConfigError` whose message starts
    with the slash-separated path of the offending field.  Unknown keys are
    rejected at every level.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: not valid YAML ({exc})") from exc
    raw = _mapping(raw, "config")
    _check_keys(raw, "config", _TOP_KEYS)

    if "experiment" not in raw:
        _fail("experiment", "required")
    try:
        experiment = Experiment(raw["experiment"])
    except ValueError:
        choices = ", ".join(e.value for e in Experiment)
        _fail("experiment", f"must be one of: {choices}")

    if "states" not in raw or not isinstance(raw["states"], list) or not raw["states"]:
        _fail("states", "a non-empty list is required")
    sized_by_grid = experiment in _GRID_SUPPLIES_STATE_SIZE
    states = tuple(
        _parse_state(node, f"states/{i}", sized_by_grid)
        for i, node in enumerate(raw["states"])
    )

    theta: tuple[float, ...] | None = None
    if experiment in _USES_THETA:
        if "theta_grid" not in raw:
            _fail("theta_grid", f"required for experiment '{experiment.value}'")
        theta = _grid(raw["theta_grid"], "theta_grid")
    elif "theta_grid" in raw:
        _fail("theta_grid", f"not used by experiment '{experiment.value}'")

    if "L_list" in raw:
        if experiment not in _USES_L:
            _fail("L_list", f"not used by experiment '{experiment.value}'")
        node = raw["L_list"]
        if not isinstance(node, list) or not node:
            _fail("L_list", "expected a non-empty list of integers")
        L_list = tuple(_positive_int(v, f"L_list/{i}") for i, v in enumerate(node))
    else:
        L_list = (1,)

    if ("T_a" in raw or "T_b" in raw) and experiment not in _USES_LOSS:
        key = "T_a" if "T_a" in raw else "T_b"
        _fail(key, f"not used by experiment '{experiment.value}'")
    t_pairs = _pair_t(
        _parse_t(raw.get("T_a", 1.0), "T_a"),
        _parse_t(raw.get("T_b", 1.0), "T_b"),
    )

    bias_raw = raw.get("bias_mode", "GEARED")
    if bias_raw not in ("GEARED", "EXTERNAL"):
        _fail("bias_mode", "must be GEARED or EXTERNAL")
    bias_mode = BiasMode[bias_raw]

    numeric = _mapping(raw.get("numeric", {}), "numeric")
    _check_keys(numeric, "numeric", ("leak_tol", "cutoff_cap", "fd_step"))
    leak_tol = _finite(numeric.get("leak_tol", 1e-9), "numeric/leak_tol")
    if not 0.0 < leak_tol < 1.0:
        _fail("numeric/leak_tol", "must lie in (0, 1)")
    cutoff_cap = _positive_int(numeric.get("cutoff_cap", 64), "numeric/cutoff_cap", 8)
    fd_step = None
    if numeric.get("fd_step") is not None:
        fd_step = _finite(numeric["fd_step"], "numeric/fd_step")
        if fd_step <= 0:
            _fail("numeric/fd_step", "must be > 0")

    n_grid = None
    if experiment in _USES_N_GRID:
        if "n_grid" not in raw:
            _fail("n_grid", f"required for experiment '{experiment.value}'")
        n_grid = _grid(raw["n_grid"], "n_grid")
        for i, v in enumerate(n_grid):
            if v < 0:
                _fail(f"n_grid/{i}", "must be >= 0")
    elif "n_grid" in raw:
        _fail("n_grid", f"not used by experiment '{experiment.value}'")

    r_grid = None
    if experiment in _USES_R_GRID:
        if "r_grid" not in raw:
            _fail("r_grid", f"required for experiment '{experiment.value}'")
        r_grid = _grid(raw["r_grid"], "r_grid")
        for i, v in enumerate(r_grid):
            if v < 0:
                _fail(f"r_grid/{i}", "must be >= 0")
    elif "r_grid" in raw:
        _fail("r_grid", f"not used by experiment '{experiment.value}'")

    wigner_section = None
    if experiment is Experiment.WIGNER:
        node = _mapping(raw.get("wigner", {}), "wigner")
        _check_keys(node, "wigner", ("extent", "points", "mode"))
        extent = None
        if node.get("extent") is not None:
            extent = _finite(node["extent"], "wigner/extent")
            if extent <= 0:
                _fail("wigner/extent", "must be > 0")
        points = None
        if node.get("points") is not None:
            points = _positive_int(node["points"], "wigner/points", 5)
        mode = node.get("mode", "a")
        if mode not in _WIGNER_MODES:
            _fail("wigner/mode", f"must be one of: {', '.join(_WIGNER_MODES)}")
        wigner_section = WignerSection(extent=extent, points=points, mode=mode)
    elif "wigner" in raw:
        _fail("wigner", f"not used by experiment '{experiment.value}'")

    fock_window = None
    if experiment is Experiment.JOINT_DISTRIBUTION:
        fock_window = _positive_int(raw.get("fock_window", 24), "fock_window", 2)
    elif "fock_window" in raw:
        _fail("fock_window", f"not used by experiment '{experiment.value}'")

    output_path = None
    output_format = "csv"
    if "output" in raw:
        node = _mapping(raw["output"], "output")
        _check_keys(node, "output", ("path", "format"))
        if node.get("path") is not None:
            if not isinstance(node["path"], str):
                _fail("output/path", "expected a string")
            output_path = node["path"]
        output_format = node.get("format", "csv")
        if output_format not in ("csv", "json"):
            _fail("output/format", "must be csv or json")

    return SweepSpec(
        experiment=experiment,
        states=states,
        theta=theta,
        L_list=L_list,
        t_pairs=t_pairs,
        bias_mode=bias_mode,
        leak_tol=leak_tol,
        cutoff_cap=cutoff_cap,
        fd_step=fd_step,
        n_grid=n_grid,
        r_grid=r_grid,
        wigner=wigner_section,
        fock_window=fock_window,
        output_path=output_path,
        output_format=output_format,
    )


# ---------------------------------------------------------------------------
# sweep execution

# Heaviness thresholds for lossy sweeps; beyond these the run must be
# explicitly allowed because branch enumeration grows steeply.
_HEAVY_TARGET_N = 12.0
_HEAVY_CUTOFF = 64


def _check_guardrails(spec: SweepSpec, allow_heavy: bool) -> None:
    if not spec.lossy or allow_heavy:
        return
    targets = [s.target_N for s in spec.states if s.target_N is not None]
    if spec.n_grid is not None:
        targets.extend(spec.n_grid)
    for t in targets:
        if t > _HEAVY_TARGET_N:
            _fail(
                "states/target_N",
                f"lossy sweep with target_N = {t:g} > {_HEAVY_TARGET_N:g} "
                "requires allow_heavy (--allow-heavy)",
            )
    if spec.cutoff_cap > _HEAVY_CUTOFF:
        _fail(
            "numeric/cutoff_cap",
            f"lossy sweep with cutoff_cap = {spec.cutoff_cap} > {_HEAVY_CUTOFF} "
            "requires allow_heavy (--allow-heavy)",
        )


@dataclass
class _Resolved:
    """A state request bound to a concrete squeezing parameter and grid."""

    spec: StateSpec
    state: object  # TwoModeState
    cutoff: int


# Truncation error is amplified by the parity's alternating sums (observed
# factor ~1e4 for the heaviest tails), so fringe evaluations pad the minimal
# cutoff by a fixed margin to keep the deviation columns below 1e-6.
_FRINGE_MARGIN = 10


def _resolve(
    req: StateRequest,
    spec: SweepSpec,
    target_N: float | None = None,
    min_cutoff: int = 0,
    margin: int = 0,
) -> _Resolved:
    if req.r is not None:
        sspec = StateSpec.from_name(req.name, req.r, req.psi)
    else:
        goal = req.target_N if target_N is None else target_N
        probe = StateSpec.from_name(req.name, 0.5, req.psi)
        sspec = probe.with_r(invert_mean_photon(probe, goal))
    cutoff = choose_cutoff(sspec, spec.leak_tol, cap=spec.cutoff_cap)
    cutoff = max(min(cutoff + margin, spec.cutoff_cap), cutoff, min_cutoff)
    state, _ = build_state(sspec, cutoff)
    return _Resolved(spec=sspec, state=state, cutoff=cutoff)


# Closed-form reference parity, keyed by state label.  Loss is supported for
# the subtracted-order-1 state and the squeezed vacuum; the others apply only
# to lossless sweeps.
def _reference_parity(
    label: str, z: float, theta: float, L: int, ta: float, tb: float
) -> float | None:
    lossless = ta == 1.0 and tb == 1.0
    try:
        if label == "TMSV":
            return closed_forms.parity_tmsv_lossy(z, theta, L, ta, tb)
        if label == "PS11":
            return closed_forms.parity_ps11_lossy(z, theta, L, ta, tb)
        if not lossless:
            return None
        if label == "PSA11":
            return closed_forms.parity_psa11(z, theta, L)
        if label == "PAS11":
            return closed_forms.parity_pas11(z, theta, L)
        if label == "PA11":
            return closed_forms.parity_pa11(z, theta, L)
    except DegenerateState:
        return None
    return None


def _reference_sensitivity(
    label: str, z: float, theta: float, L: int, ta: float, tb: float
) -> float | None:
    if ta != 1.0 or tb != 1.0:
        return None
    try:
        if label == "PSA11":
            return closed_forms.sens_psa11(z, theta, L)
        if label == "PAS11":
            return closed_forms.sens_pas11(z, theta, L)
    except (DegenerateState, DerivativeVanished):
        return None
    return None


def _delta_theta(p: np.ndarray, dp: np.ndarray) -> np.ndarray:
    noise = np.sqrt(np.clip(1.0 - p * p, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = noise / np.abs(dp)
    # 0/0 points (flat fringe at an extremum) diverge rather than vanish
    return np.where(np.abs(dp) < 1e-300, np.inf, delta)


def _fringe_slope(fringe, thetas: np.ndarray, fd_step: float | None) -> np.ndarray:
    if fd_step is None:
        return np.asarray(fringe.derivative(thetas))
    up = np.asarray(fringe.evaluate(thetas + fd_step))
    down = np.asarray(fringe.evaluate(thetas - fd_step))
    return (up - down) / (2.0 * fd_step)


@dataclass
class _UnitResult:
    rows: list[tuple]
    cutoffs: list[int | None]
    leakages: list[float | None]


def _error_unit(template: Callable[[str], list[tuple]], message: str) -> _UnitResult:
    rows = template(message)
    return _UnitResult(rows=rows, cutoffs=[None] * len(rows), leakages=[None] * len(rows))


def _build_units(spec: SweepSpec) -> tuple[tuple[str, ...], list[Callable[[], _UnitResult]]]:
    """Return (header, ordered unit callables) for the requested experiment.

    One unit covers the rows that share a single propagation (one state at
    one loss split and charge); units are independent and may run in any
    order, results are reassembled in the declared order.
    """
    exp = spec.experiment
    thetas = np.asarray(spec.theta, dtype=float) if spec.theta is not None else None

    if exp in (Experiment.SIGNAL, Experiment.SENSITIVITY):
        return _units_fringe(spec, thetas)
    if exp is Experiment.SENSITIVITY_VS_N:
        return _units_sensitivity_vs_n(spec, thetas)
    if exp is Experiment.FWHM_VS_L:
        return _units_fwhm(spec, thetas)
    if exp is Experiment.QCRB:
        return _units_qcrb(spec, thetas)
    if exp is Experiment.DIAGNOSTICS:
        return _units_diagnostics(spec)
    if exp is Experiment.WIGNER:
        return _units_wigner(spec)
    if exp is Experiment.JOINT_DISTRIBUTION:
        return _units_joint(spec)
    if exp is Experiment.PHOTON_VS_R:
        return _units_photon_vs_r(spec)
    if exp is Experiment.ENTROPY_VS_N:
        return _units_entropy_vs_n(spec)
    raise AssertionError(f"unhandled experiment {exp}")


def _units_fringe(spec: SweepSpec, thetas: np.ndarray):
    sens = spec.experiment is Experiment.SENSITIVITY
    if sens:
        header = (
            "state", "r", "L", "T_a", "T_b", "theta",
            "parity", "d_parity_d_theta", "delta_theta",
            "reference", "deviation", "error",
        )
    else:
        header = (
            "state", "r", "L", "T_a", "T_b", "theta",
            "parity", "reference", "deviation", "error",
        )
    units = []
    for req in spec.states:
        for L in spec.L_list:
            for ta, tb in spec.t_pairs:
                units.append(_fringe_unit(spec, req, L, ta, tb, thetas, sens))
    return header, units


def _fringe_unit(spec, req, L, ta, tb, thetas, sens):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label
        blanks = 5 if sens else 3

        def broken(msg: str) -> list[tuple]:
            return [
                (label, req.r, L, ta, tb, th) + (None,) * blanks + (msg,)
                for th in thetas
            ]

        try:
            res = _resolve(req, spec, margin=_FRINGE_MARGIN)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        cfg = InterferometerConfig(
            theta=0.0, L=L, T_a=ta, T_b=tb, bias_mode=spec.bias_mode
        )
        fringe = parity_fringe(res.state, cfg)
        p = np.asarray(fringe.evaluate(thetas))
        z = math.tanh(res.spec.r)
        rows = []
        if sens:
            dp = _fringe_slope(fringe, thetas, spec.fd_step)
            delta = _delta_theta(p, dp)
            for i, th in enumerate(thetas):
                ref = _reference_sensitivity(label, z, float(th), L, ta, tb)
                dev = abs(delta[i] - ref) if ref is not None else None
                rows.append((
                    label, res.spec.r, L, ta, tb, float(th),
                    float(p[i]), float(dp[i]), float(delta[i]), ref, dev, "",
                ))
        else:
            for i, th in enumerate(thetas):
                ref = _reference_parity(label, z, float(th), L, ta, tb)
                dev = abs(p[i] - ref) if ref is not None else None
                rows.append((
                    label, res.spec.r, L, ta, tb, float(th),
                    float(p[i]), ref, dev, "",
                ))
        n = len(rows)
        leak = 1.0 - fringe.captured + res.state.leakage
        return _UnitResult(rows, [res.cutoff] * n, [leak] * n)

    return run


def _units_sensitivity_vs_n(spec: SweepSpec, thetas: np.ndarray):
    header = (
        "state", "target_N", "r", "L", "T_a", "T_b", "theta",
        "parity", "d_parity_d_theta", "delta_theta", "snl", "hl", "error",
    )
    units = []
    for req in spec.states:
        for target in spec.n_grid:
            for L in spec.L_list:
                for ta, tb in spec.t_pairs:
                    units.append(
                        _sens_vs_n_unit(spec, req, target, L, ta, tb, thetas)
                    )
    return header, units


def _sens_vs_n_unit(spec, req, target, L, ta, tb, thetas):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label
        snl = 1.0 / math.sqrt(target) if target > 0 else math.inf
        hl = 1.0 / target if target > 0 else math.inf

        def broken(msg: str) -> list[tuple]:
            return [
                (label, target, None, L, ta, tb, th,
                 None, None, None, snl, hl, msg)
                for th in thetas
            ]

        try:
            res = _resolve(req, spec, target_N=target, margin=_FRINGE_MARGIN)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        cfg = InterferometerConfig(
            theta=0.0, L=L, T_a=ta, T_b=tb, bias_mode=spec.bias_mode
        )
        fringe = parity_fringe(res.state, cfg)
        p = np.asarray(fringe.evaluate(thetas))
        dp = _fringe_slope(fringe, thetas, spec.fd_step)
        delta = _delta_theta(p, dp)
        rows = [
            (label, target, res.spec.r, L, ta, tb, float(th),
             float(p[i]), float(dp[i]), float(delta[i]), snl, hl, "")
            for i, th in enumerate(thetas)
        ]
        leak = 1.0 - fringe.captured + res.state.leakage
        return _UnitResult(rows, [res.cutoff] * len(rows), [leak] * len(rows))

    return run


def _units_fwhm(spec: SweepSpec, thetas: np.ndarray):
    header = ("state", "r", "L", "T_a", "T_b", "fwhm", "theta_at_peak", "error")
    units = []
    for req in spec.states:
        for L in spec.L_list:
            for ta, tb in spec.t_pairs:
                units.append(_fwhm_unit(spec, req, L, ta, tb, thetas))
    return header, units


def _fwhm_unit(spec, req, L, ta, tb, thetas):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [(label, req.r, L, ta, tb, None, None, msg)]

        try:
            res = _resolve(req, spec, margin=_FRINGE_MARGIN)
            cfg = InterferometerConfig(
                theta=0.0, L=L, T_a=ta, T_b=tb, bias_mode=spec.bias_mode
            )
            fringe = parity_fringe(res.state, cfg)
            p = np.asarray(fringe.evaluate(thetas))
            width = fwhm(list(zip(thetas.tolist(), p.tolist())))
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        peak_theta = float(thetas[int(np.argmax(p))])
        rows = [(label, res.spec.r, L, ta, tb, width, peak_theta, "")]
        leak = 1.0 - fringe.captured + res.state.leakage
        return _UnitResult(rows, [res.cutoff], [leak])

    return run


def _units_qcrb(spec: SweepSpec, thetas: np.ndarray):
    header = (
        "state", "target_N", "r", "L", "mean_photon",
        "qfi", "qcrb", "min_delta_theta", "theta_at_min", "error",
    )
    units = []
    for req in spec.states:
        for target in spec.n_grid:
            for L in spec.L_list:
                units.append(_qcrb_unit(spec, req, target, L, thetas))
    return header, units


def _qcrb_unit(spec, req, target, L, thetas):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [(label, target, None, L, None, None, None, None, None, msg)]

        try:
            res = _resolve(req, spec, target_N=target, margin=_FRINGE_MARGIN)
            info = qfi(res.state)
        except (SimulationError, ZeroInformation) as exc:
            return _error_unit(broken, str(exc))
        cfg = InterferometerConfig(theta=0.0, L=L, bias_mode=spec.bias_mode)
        fringe = parity_fringe(res.state, cfg)
        p = np.asarray(fringe.evaluate(thetas))
        dp = np.asarray(fringe.derivative(thetas))
        delta = _delta_theta(p, dp)
        finite = np.isfinite(delta)
        if not finite.any():
            return _error_unit(broken, "no finite sensitivity on the theta grid")
        idx = int(np.argmin(np.where(finite, delta, np.inf)))
        rows = [(
            label, target, res.spec.r, L, mean_photon(res.state),
            info.f_q, info.qcrb / L, float(delta[idx]), float(thetas[idx]), "",
        )]
        leak = 1.0 - fringe.captured + res.state.leakage
        return _UnitResult(rows, [res.cutoff], [leak])

    return run


def _units_diagnostics(spec: SweepSpec):
    header = ("state", "r", "mean_photon", "entropy", "cutoff", "leakage", "error")
    units = [_diagnostics_unit(spec, req) for req in spec.states]
    return header, units


def _diagnostics_unit(spec, req):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [(label, req.r, None, None, None, None, msg)]

        try:
            res = _resolve(req, spec)
            ent = entropy(res.state)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        leak = res.state.leakage
        rows = [(label, res.spec.r, mean_photon(res.state), ent, res.cutoff, leak, "")]
        return _UnitResult(rows, [res.cutoff], [leak])

    return run


def _units_wigner(spec: SweepSpec):
    header = (
        "state", "r", "L", "mode", "re_alpha", "im_alpha", "value", "error",
    )
    units = []
    for req in spec.states:
        for L in spec.L_list:
            units.append(_wigner_unit(spec, req, L))
    return header, units


def _wigner_unit(spec, req, L):
    section = spec.wigner

    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [(label, req.r, L, section.mode, None, None, None, msg)]

        try:
            res = _resolve(req, spec)
            if section.mode == "after_bs1_a":
                cfg = InterferometerConfig(theta=0.0, L=L, bias_mode=spec.bias_mode)
                st = embed(res.state, 2 * res.state.cutoff - 1)
                st = beam_splitter(st, "BS1")
                st = oam_phase(st, cfg.theta_effective, L)
                rho = reduced_density(st, Mode.A)
            elif section.mode == "b":
                rho = reduced_density(res.state, Mode.B)
            else:
                rho = reduced_density(res.state, Mode.A)
            nbar = float(
                np.real(np.diagonal(rho.matrix) @ np.arange(rho.cutoff))
            )
            extent = section.extent
            if extent is None:
                extent = math.ceil(4.0 * (3.0 + math.sqrt(nbar))) / 4.0
            points = section.points
            if points is None:
                # finest spacing the negativity bound asks for, odd count so
                # alpha = 0 lands on a node
                spacing = 1.0 / (2.0 * math.sqrt(2.0 * nbar + 1.0))
                points = 2 * math.ceil(extent / spacing) + 1
            grid = WignerGridSpec(extent=extent, points=points)
            result = wigner(rho, grid)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        rows = []
        axis = grid.axis
        for i, im in enumerate(axis):
            for j, re in enumerate(axis):
                rows.append((
                    label, res.spec.r, L, section.mode,
                    float(re), float(im), float(result.values[i, j]), "",
                ))
        n = len(rows)
        return _UnitResult(rows, [res.cutoff] * n, [res.state.leakage] * n)

    return run


def _units_joint(spec: SweepSpec):
    header = ("state", "r", "n_a", "n_b", "probability", "error")
    units = [_joint_unit(spec, req) for req in spec.states]
    return header, units


def _joint_unit(spec, req):
    window = spec.fock_window

    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [
                (label, req.r, na, nb, None, msg)
                for na in range(window)
                for nb in range(window)
            ]

        try:
            res = _resolve(req, spec, min_cutoff=window)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        dist = joint_distribution(res.state)
        rows = [
            (label, res.spec.r, na, nb, float(dist.probabilities[na, nb]), "")
            for na in range(window)
            for nb in range(window)
        ]
        n = len(rows)
        return _UnitResult(rows, [res.cutoff] * n, [res.state.leakage] * n)

    return run


def _units_photon_vs_r(spec: SweepSpec):
    header = ("state", "r", "mean_photon", "error")
    units = [_photon_unit(spec, req) for req in spec.states]
    return header, units


def _photon_unit(spec, req):
    r_values = spec.r_grid

    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label
        rows = []
        for r in r_values:
            try:
                sspec = StateSpec.from_name(req.name, r, req.psi)
                n = mean_photon_of_spec(sspec)
            except SimulationError as exc:
                rows.append((label, r, None, str(exc)))
                continue
            rows.append((label, r, n, ""))
        # the weight sums are exact, no truncation is involved
        return _UnitResult(rows, [None] * len(rows), [None] * len(rows))

    return run


def _units_entropy_vs_n(spec: SweepSpec):
    header = ("state", "target_N", "r", "mean_photon", "entropy", "error")
    units = []
    for req in spec.states:
        for target in spec.n_grid:
            units.append(_entropy_unit(spec, req, target))
    return header, units


def _entropy_unit(spec, req, target):
    def run() -> _UnitResult:
        label = StateSpec.from_name(req.name, 0.5).label

        def broken(msg: str) -> list[tuple]:
            return [(label, target, None, None, None, msg)]

        try:
            res = _resolve(req, spec, target_N=target)
            ent = entropy(res.state)
        except SimulationError as exc:
            return _error_unit(broken, str(exc))
        rows = [(label, target, res.spec.r, mean_photon(res.state), ent, "")]
        return _UnitResult(rows, [res.cutoff], [res.state.leakage])

    return run


def run_sweep(
    spec: SweepSpec,
    jobs: int | None = None,
    allow_heavy: bool = False,
    progress: Callable[[int, int], None] | None = None,
) -> ResultTable:
    """Evaluate the sweep on its full grid.

    ``jobs`` bounds the worker threads (default: available parallelism); the
    output is identical for any value.  Per-point failures are recorded in
    the ``error`` column and never abort the sweep; only configuration-level
    problems (grid/guardrail violations) raise.
    """
    _check_guardrails(spec, allow_heavy)
    header, units = _build_units(spec)
    results: list[_UnitResult | None] = [None] * len(units)
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, len(units) or 1))

    if jobs == 1:
        for i, unit in enumerate(units):
            results[i] = unit()
            if progress is not None:
                progress(i + 1, len(units))
    else:
        done = 0
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(unit): i for i, unit in enumerate(units)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
                done += 1
                if progress is not None:
                    progress(done, len(units))

    rows: list[tuple] = []
    cutoffs: list[int | None] = []
    leakages: list[float | None] = []
    for res in results:
        assert res is not None
        rows.extend(res.rows)
        cutoffs.extend(res.cutoffs)
        leakages.extend(res.leakages)

    metadata = {
        "config_hash": spec.config_hash,
        "tool_version": TOOL_VERSION,
        "experiment": spec.experiment.value,
        "config": spec.canonical(),
        "row_count": len(rows),
        "columns": list(header),
        "points": {
            "cutoff": cutoffs,
            "leakage": leakages,
        },
    }
    return ResultTable(header=header, rows=rows, metadata=metadata)


# ---------------------------------------------------------------------------
# serialization


def _format_value(value) -> str:
    """CSV cell text; floats round-trip exactly at 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _json_rows(table: ResultTable) -> list[dict]:
    return [
        {col: _json_value(cell) for col, cell in zip(table.header, row)}
        for row in table.rows
    ]


def _sanitize_metadata(metadata: dict):
    """Metadata may hold None/inf leakage entries; keep JSON strict."""
    if isinstance(metadata, dict):
        return {k: _sanitize_metadata(v) for k, v in metadata.items()}
    if isinstance(metadata, (list, tuple)):
        return [_sanitize_metadata(v) for v in metadata]
    if isinstance(metadata, (int, float, np.integer, np.floating)) and not isinstance(
        metadata, bool
    ):
        return _json_value(metadata)
    return metadata


def emit(table: ResultTable, path: str | Path, fmt: str = "csv") -> list[Path]:
    """Write the table plus its metadata sidecar; returns the written paths.

    CSV uses minimal RFC-4180 quoting, a '.' decimal separator and 17
    significant digits; JSON holds an object with ``metadata`` and ``rows``
    keys.  A ``<stem>.meta.json`` sidecar is always written next to the
    table.  Raises IoError when the destination cannot be written.
    """
    path = Path(path)
    meta_path = path.with_suffix(".meta.json") if path.suffix else Path(
        str(path) + ".meta.json"
    )
    metadata = _sanitize_metadata(table.metadata)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(table.header)
                for row in table.rows:
                    writer.writerow([_format_value(v) for v in row])
        elif fmt == "json":
            payload = {"metadata": metadata, "rows": _json_rows(table)}
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=1, sort_keys=False)
                handle.write("\n")
        else:
            raise ConfigError(f"output/format: must be csv or json, got {fmt!r}")
        with open(meta_path, "w", encoding="utf-8") as handle:
            json.dump(metadata, handle, indent=1, sort_keys=True)
            handle.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    return [path, meta_path]
