"""Input-state construction: two-mode squeezed vacuum and Bose-operator variants.

The non-Gaussian inputs are built by applying photon creation and annihilation
operators to a two-mode squeezed vacuum (TMSV).  Names encode the recipe:

* ``PA``  - photon addition (creations only),
* ``PS``  - photon subtraction (annihilations only),
* ``PAS`` - addition then subtraction,
* ``PSA`` - subtraction then addition.

A numeric suffix gives the operator orders, e.g. ``PSA11`` applies one
subtraction and one addition per mode, ``PSA22`` two of each.

Two operator-placement conventions exist for ``PAS``/``PSA``.  The default
(:attr:`OperatorConvention.SYMMETRIC`) applies creations to both modes and
annihilations to both modes, which is the convention the analytic fringe
formulas in :mod:`oam_mzi.closed_forms` reproduce.  The alternative
(:attr:`OperatorConvention.MIXED`) places creations on one mode and
annihilations on the other; it is kept for comparison only.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import CutoffCapExceeded, ZeroNorm
from .fock import Mode, TwoModeState, apply_annihilation, apply_creation, normalize

__all__ = [
    "StateKind",
    "OperatorConvention",
    "StateSpec",
    "tmsv",
    "build_state",
    "choose_cutoff",
    "diagonal_weights",
    "DEFAULT_CUTOFF_CAP",
]

DEFAULT_CUTOFF_CAP = 64
_MIN_CUTOFF = 4


class StateKind(str, Enum):
    """The five supported input-state families."""

    TMSV = "TMSV"
    PA = "PA"
    PS = "PS"
    PAS = "PAS"
    PSA = "PSA"


class OperatorConvention(str, Enum):
    """Placement of creation/annihilation operators for PAS/PSA states.

    SYMMETRIC applies every creation to both modes and every annihilation to
    both modes (one of each per order step).  MIXED places creations on mode A
    and annihilations on mode B (or vice versa for PSA), yielding states whose
    photon numbers differ between the arms.
    """

    SYMMETRIC = "symmetric"
    MIXED = "mixed"


@dataclass(frozen=True)
class StateSpec:
    """Recipe for an input state.

    Parameters
    ----------
    kind:
        State family.
    G, H:
        Creation orders on modes A and B.
    J, K:
        Annihilation orders on modes A and B.
    r:
        Squeezing parameter (non-negative).
    psi:
        Squeezing angle in radians.  All reference formulas assume 0.
    """

    kind: StateKind
    G: int = 0
    H: int = 0
    J: int = 0
    K: int = 0
    r: float = 0.0
    psi: float = 0.0

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("squeezing parameter must be non-negative")
        orders = (self.G, self.H, self.J, self.K)
        if any(o < 0 for o in orders):
            raise ValueError("operator orders must be non-negative")
        kind = StateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is StateKind.TMSV and any(orders):
            raise ValueError("TMSV takes no operator orders")
        if kind is StateKind.PA and (self.J or self.K):
            raise ValueError("PA is built from creations only (J = K = 0)")
        if kind is StateKind.PS and (self.G or self.H):
            raise ValueError("PS is built from annihilations only (G = H = 0)")
        if kind in (StateKind.PAS, StateKind.PSA) and not all(
            o >= 1 for o in orders
        ):
            raise ValueError("PAS/PSA require G, H, J, K >= 1")

    @property
    def label(self) -> str:
        """Short display name such as ``PSA11`` or ``TMSV``."""
        if self.kind is StateKind.TMSV:
            return "TMSV"
        if self.kind is StateKind.PA:
            return f"PA{self.G}{self.H}"
        if self.kind is StateKind.PS:
            return f"PS{self.J}{self.K}"
        return f"{self.kind.value}{self.G}{self.H}"

    @classmethod
    def from_name(cls, name: str, r: float, psi: float = 0.0) -> "StateSpec":
        """Build a spec from a short name like ``"PSA11"`` or ``"tmsv"``.

        The one- or two-digit suffix fixes every nonzero order to that digit
        (``PA2`` and ``PA22`` both mean G = H = 2).
        """
        m = re.fullmatch(r"(?i)(TMSV|PAS|PSA|PA|PS)(\d{0,2})", name.strip())
        if not m:
            raise ValueError(f"unrecognized state name: {name!r}")
        kind = StateKind(m.group(1).upper())
        digits = m.group(2)
        if kind is StateKind.TMSV:
            if digits:
                raise ValueError("TMSV takes no order suffix")
            return cls(kind=kind, r=r, psi=psi)
        if not digits:
            order = 1
        elif len(digits) == 1 or digits[0] == digits[1]:
            order = int(digits[0])
        else:
            raise ValueError(f"unequal operator orders not supported: {name!r}")
        if kind is StateKind.PA:
            return cls(kind=kind, G=order, H=order, r=r, psi=psi)
        if kind is StateKind.PS:
            return cls(kind=kind, J=order, K=order, r=r, psi=psi)
        return cls(kind=kind, G=order, H=order, J=order, K=order, r=r, psi=psi)

    def with_r(self, r: float) -> "StateSpec":
        return replace(self, r=r)


def tmsv(r: float, psi: float = 0.0, cutoff: int = 32) -> TwoModeState:
    """Two-mode squeezed vacuum on the truncated grid.

    Amplitudes sit on the diagonal ``|n, n>`` with coefficient
    ``(-e^{i psi} tanh r)^n / cosh r``.  The leakage field carries the exact
    geometric tail weight beyond the cutoff.
    """
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    z = math.tanh(r)
    amps = np.zeros((cutoff, cutoff), dtype=complex)
    n = np.arange(cutoff)
    phase = -z * np.exp(1j * psi)
    amps[n, n] = phase**n / math.cosh(r)
    tail = (z * z) ** cutoff  # sum_{n >= cutoff} (1 - z^2) z^{2n}
    return TwoModeState(amplitudes=amps, leakage=float(tail))


def _operator_plan(
    spec: StateSpec, convention: OperatorConvention
) -> list[tuple[str, Mode]]:
    """Ordered list of (op, mode) pairs, first-applied first."""
    creations: list[tuple[str, Mode]] = []
    annihilations: list[tuple[str, Mode]] = []
    if convention is OperatorConvention.SYMMETRIC or spec.kind in (
        StateKind.PA,
        StateKind.PS,
    ):
        creations += [("create", Mode.A)] * spec.G + [("create", Mode.B)] * spec.H
        annihilations += [("destroy", Mode.A)] * spec.J + [
            ("destroy", Mode.B)
        ] * spec.K
    elif spec.kind is StateKind.PAS:
        # mixed placement: creations on A, annihilations on B
        creations += [("create", Mode.A)] * spec.G
        annihilations += [("destroy", Mode.B)] * spec.H
    else:  # mixed PSA: annihilations on A, creations on B
        creations += [("create", Mode.B)] * spec.H
        annihilations += [("destroy", Mode.A)] * spec.G

    if spec.kind in (StateKind.TMSV,):
        return []
    if spec.kind is StateKind.PA:
        return creations
    if spec.kind is StateKind.PS:
        return annihilations
    if spec.kind is StateKind.PAS:  # add first, subtract second
        return creations + annihilations
    return annihilations + creations  # PSA: subtract first, add second


def build_state(
    spec: StateSpec,
    cutoff: int,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
    leak_tol: float | None = None,
) -> tuple[TwoModeState, float]:
    """Construct the normalized input state.

    Returns the state together with the pre-normalization norm of the raw
    operator product (useful as a diagnostic; it never enters the physics).

    Raises
    ------
    ZeroNorm
        If the recipe annihilates the state entirely, e.g. subtraction at
        ``r = 0``.
    LeakageExceeded
        If a creation at the truncation boundary spills more weight than
        ``leak_tol`` allows.
    """
    state = tmsv(spec.r, spec.psi, cutoff)
    for op, mode in _operator_plan(spec, convention):
        if op == "create":
            state = apply_creation(state, mode, leak_tol=leak_tol)
        else:
            state = apply_annihilation(state, mode)
    state, norm_before = normalize(state)
    return state, norm_before


def choose_cutoff(
    spec: StateSpec,
    leak_tol: float,
    cap: int = DEFAULT_CUTOFF_CAP,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
) -> int:
    """Smallest cutoff keeping the constructed state's leakage below tolerance.

    Searches by doubling, then bisects.  The returned cutoff also reserves
    enough headroom that applying the recipe's creation operators never walks
    off the grid: the leakage accounting inside ``build_state`` covers the
    whole construction, so the predicate is simply the final leakage.
    """
    if not 0 < leak_tol < 1:
        raise ValueError("leak_tol must lie in (0, 1)")

    floor = max(_MIN_CUTOFF, spec.G + spec.H + 2)

    def ok(c: int) -> bool:
        try:
            state, _ = build_state(spec, c, convention)
        except ZeroNorm:
            # degenerate recipe: any cutoff works equally well, report floor
            return True
        return state.leakage < leak_tol

    c = floor
    while not ok(c):
        if c >= cap:
            raise CutoffCapExceeded(
                f"cutoff cap {cap} reached with leakage above {leak_tol:g} "
                f"for {spec.label}"
            )
        c = min(2 * c, cap)
    lo, hi = floor, c  # ok(hi) holds; find the smallest ok cutoff
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return hi


def diagonal_weights(
    spec: StateSpec,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
    count: int = 512,
) -> tuple[int, int, np.ndarray]:
    """Exact 1-D weight sequence of the constructed state.

    Every supported recipe produces amplitudes on a single shifted diagonal
    ``|n + da, n + db>``.  This helper applies the operator ladder directly to
    the squeezed-vacuum coefficient sequence, which is cheap and free of any
    grid truncation, so it serves as an independent oracle for the full
    two-mode construction and for mean-photon-number sums.

    Returns ``(da, db, weights)`` with ``weights[n]`` the unnormalized
    amplitude of ``|n + da, n + db>``.
    """
    z = math.tanh(spec.r)
    n = np.arange(count)
    w = ((-z * np.exp(1j * spec.psi)) ** n / math.cosh(spec.r)).astype(complex)
    da = db = 0
    for op, mode in _operator_plan(spec, convention):
        occ = n + (da if mode is Mode.A else db)
        if op == "create":
            w = w * np.sqrt(occ + 1)
            if mode is Mode.A:
                da += 1
            else:
                db += 1
        else:
            w = w * np.sqrt(occ)
            if mode is Mode.A:
                da -= 1
            else:
                db -= 1
            if da < 0 or db < 0:
                # the factor above zeroed w[0]; shift the diagonal up
                w = w[1:]
                n = n[:-1]
                da += 1
                db += 1
    return da, db, w
