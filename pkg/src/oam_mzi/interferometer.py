"""Mach-Zehnder propagation with orbital-angular-momentum phase gearing.

The interferometer is modelled as: 50/50 beam splitter, a relative phase that
an OAM quantum number ``L`` multiplies, photon loss in either arm, and a
second (inverse) beam splitter.  States live on a truncated two-mode Fock
grid; before the first beam splitter the grid is enlarged so that every
occupied total-photon sector rotates unitarily instead of being clipped.

Loss is a standard amplitude-damping (beam-splitter-to-environment) channel.
For pure inputs it is handled by enumerating Kraus branches, each branch a
pure state tagged by the number of photons lost from each arm; mixed states
go through the density-operator Kraus sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import InvalidTransmittance
from .fock import DensityOperator, Mode, TwoModeState, embed

__all__ = [
    "BiasMode",
    "InterferometerConfig",
    "beam_splitter",
    "oam_phase",
    "loss",
    "propagate",
    "LossBranch",
    "PropagationResult",
]


class BiasMode(str, Enum):
    """How the fixed phase offset combines with the signal phase.

    GEARED adds the bias to the signal before the OAM factor, so the total
    accumulated offset is ``L * bias`` and the fringe stays centred at the
    same ``theta`` for every ``L``.  EXTERNAL applies the bias after gearing,
    as a plain offset of ``bias`` radians on the accumulated phase.
    """

    GEARED = "geared"
    EXTERNAL = "external"


@dataclass(frozen=True)
class InterferometerConfig:
    """Operating point of the interferometer.

    Parameters
    ----------
    theta:
        Signal phase in radians.
    L:
        OAM quantum number (positive integer); the accumulated relative
        phase is ``L`` times the geared signal.
    T_a, T_b:
        Intensity transmittances of the two arms, in [0, 1].
    bias:
        Fixed phase offset, default ``pi / 2`` (the parity fringes of the
        symmetric states are steepest there).
    bias_mode:
        See :class:`BiasMode`.
    """

    theta: float
    L: int = 1
    T_a: float = 1.0
    T_b: float = 1.0
    bias: float = math.pi / 2
    bias_mode: BiasMode = BiasMode.GEARED

    def __post_init__(self) -> None:
        if not (isinstance(self.L, (int, np.integer)) and self.L >= 1):
            raise ValueError("L must be a positive integer")
        for name, t in (("T_a", self.T_a), ("T_b", self.T_b)):
            if not 0.0 <= t <= 1.0:
                raise InvalidTransmittance(f"{name} = {t} outside [0, 1]")
        object.__setattr__(self, "bias_mode", BiasMode(self.bias_mode))

    @property
    def theta_effective(self) -> float:
        """Signal plus bias as seen by the OAM phase element."""
        if self.bias_mode is BiasMode.GEARED:
            return self.theta + self.bias
        return self.theta + self.bias / self.L

    @property
    def lossless(self) -> bool:
        return self.T_a == 1.0 and self.T_b == 1.0


# ---------------------------------------------------------------------------
# beam splitter

_BLOCK_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _sector_block(n_total: int, sign: int) -> np.ndarray:
    """Unitary of exp(sign * i * pi/4 * (a^dag b + a b^dag)) restricted to
    the ``n_total``-photon sector, in the basis ``|k, n_total - k>``."""
    key = (n_total, sign)
    block = _BLOCK_CACHE.get(key)
    if block is None:
        k = np.arange(n_total)
        coupling = np.sqrt((k + 1.0) * (n_total - k))
        h = np.zeros((n_total + 1, n_total + 1))
        h[k, k + 1] = coupling
        h[k + 1, k] = coupling
        block = expm(sign * 0.25j * math.pi * h)
        _BLOCK_CACHE[key] = block
    return block


_BS_SIGNS = {"BS1": -1, "BS2": +1}


def _apply_bs_pure(state: TwoModeState, sign: int) -> TwoModeState:
    """Rotate every occupied total-photon sector; clipped sectors rotate in
    their full dimension and the unrepresentable part is booked as leakage."""
    c = state.cutoff
    amps = state.amplitudes
    out = np.zeros_like(amps)
    spill = 0.0
    for n_total in range(2 * c - 1):
        k_lo = max(0, n_total - (c - 1))
        k_hi = min(n_total, c - 1)
        k = np.arange(k_lo, k_hi + 1)
        vec = amps[k, n_total - k]
        if not np.any(vec):
            continue
        block = _sector_block(n_total, sign)
        if k_lo == 0 and k_hi == n_total:
            res = block @ vec
        else:
            full = np.zeros(n_total + 1, dtype=complex)
            full[k_lo : k_hi + 1] = vec
            res_full = block @ full
            res = res_full[k_lo : k_hi + 1]
            spill += float(np.sum(np.abs(res_full) ** 2) - np.sum(np.abs(res) ** 2))
        out[k, n_total - k] = res
    return TwoModeState(amplitudes=out, leakage=state.leakage + max(spill, 0.0))


def _sector_matrix(cutoff: int, sign: int) -> np.ndarray:
    """Full (cutoff^2 x cutoff^2) matrix of the truncated rotation."""
    dim = cutoff * cutoff
    u = np.zeros((dim, dim), dtype=complex)
    for n_total in range(2 * cutoff - 1):
        k_lo = max(0, n_total - (cutoff - 1))
        k_hi = min(n_total, cutoff - 1)
        k = np.arange(k_lo, k_hi + 1)
        block = _sector_block(n_total, sign)[k_lo : k_hi + 1, k_lo : k_hi + 1]
        idx = k * cutoff + (n_total - k)
        u[np.ix_(idx, idx)] = block
    return u


def beam_splitter(
    x: TwoModeState | DensityOperator, which: str
) -> TwoModeState | DensityOperator:
    """Apply one of the two 50/50 beam splitters.

    ``which`` selects ``"BS1"`` (the input splitter) or ``"BS2"`` (its
    inverse, closing the interferometer).  Pure states are rotated sector by
    sector; density operators by conjugation with the truncated rotation,
    with any trace lost in clipped sectors added to ``trace_deficit``.
    """
    try:
        sign = _BS_SIGNS[which]
    except KeyError:
        raise ValueError(f"which must be 'BS1' or 'BS2', got {which!r}") from None
    if isinstance(x, TwoModeState):
        return _apply_bs_pure(x, sign)
    u = _sector_matrix(x.cutoff, sign)
    before = float(np.trace(x.matrix).real)
    mat = u @ x.matrix @ u.conj().T
    after = float(np.trace(mat).real)
    return DensityOperator(
        matrix=mat,
        cutoff=x.cutoff,
        trace_deficit=x.trace_deficit + max(before - after, 0.0),
    )


# ---------------------------------------------------------------------------
# phase and loss

def oam_phase(
    x: TwoModeState | DensityOperator, theta_effective: float, L: int
) -> TwoModeState | DensityOperator:
    """Relative phase between the arms, geared up by the OAM number.

    Multiplies ``|n, m>`` by ``exp(-i L theta_effective (n - m) / 2)``.
    """
    if isinstance(x, TwoModeState):
        c = x.cutoff
        p = np.exp(-0.5j * L * theta_effective * np.arange(c))
        return TwoModeState(
            amplitudes=x.amplitudes * p[:, None] * p.conj()[None, :],
            leakage=x.leakage,
        )
    c = x.cutoff
    p = np.exp(-0.5j * L * theta_effective * np.arange(c))
    d = (p[:, None] * p.conj()[None, :]).ravel()
    return DensityOperator(
        matrix=x.matrix * d[:, None] * d.conj()[None, :],
        cutoff=x.cutoff,
        trace_deficit=x.trace_deficit,
    )


def _kraus_factors(cutoff: int, t: float) -> np.ndarray:
    """f[k, n] = sqrt(binom(n, k) t^(n-k) (1-t)^k) for n >= k, else 0."""
    n = np.arange(cutoff)
    f = np.zeros((cutoff, cutoff))
    if t == 1.0:
        f[0, :] = 1.0
        return f
    if t == 0.0:
        f[n, n] = 1.0
        return f
    for k in range(cutoff):
        nn = n[n >= k]
        log_binom = gammaln(nn + 1) - gammaln(k + 1) - gammaln(nn - k + 1)
        term = 0.5 * (log_binom + (nn - k) * math.log(t) + k * math.log1p(-t))
        f[k, n >= k] = np.exp(term)
    return f


def loss(rho: DensityOperator, T: float, mode: Mode) -> DensityOperator:
    """Photon loss of intensity transmittance ``T`` on one mode of a
    density operator, as an exact finite Kraus sum."""
    if not 0.0 <= T <= 1.0:
        raise InvalidTransmittance(f"transmittance {T} outside [0, 1]")
    if T == 1.0:
        return rho
    c = rho.cutoff
    f = _kraus_factors(c, T)
    r4 = rho.matrix.reshape(c, c, c, c)
    out = np.zeros_like(r4)
    axis = 0 if mode is Mode.A else 1
    for k in range(c):
        width = c - k
        if axis == 0:
            blk = r4[k:, :, k:, :] * f[k, k:][:, None, None, None] * f[k, k:][None, None, :, None]
            out[:width, :, :width, :] += blk
        else:
            blk = r4[:, k:, :, k:] * f[k, k:][None, :, None, None] * f[k, k:][None, None, None, :]
            out[:, :width, :, :width] += blk
    return DensityOperator(
        matrix=out.reshape(c * c, c * c),
        cutoff=c,
        trace_deficit=rho.trace_deficit,
    )


# ---------------------------------------------------------------------------
# full propagation

@dataclass(frozen=True)
class LossBranch:
    """Conditional pure state given ``k_a`` photons lost from arm A and
    ``k_b`` from arm B.  ``amplitudes`` is unnormalized; its squared norm is
    the branch probability."""

    k_a: int
    k_b: int
    amplitudes: np.ndarray

    @property
    def weight(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class PropagationResult:
    """Output of :func:`propagate`.

    ``branches`` holds one entry for the lossless case and one entry per
    retained Kraus branch otherwise.  ``captured`` is the total probability
    the retained branches carry; the remainder (dropped branches plus grid
    leakage) is reported in ``deficit``.
    """

    cutoff: int
    branches: tuple[LossBranch, ...]
    captured: float
    leakage: float

    @property
    def is_pure(self) -> bool:
        return len(self.branches) == 1 and self.branches[0].k_a == 0 and (
            self.branches[0].k_b == 0
        )

    @property
    def deficit(self) -> float:
        return max(1.0 - self.captured, 0.0) + self.leakage

    def density(self) -> DensityOperator:
        dim = self.cutoff * self.cutoff
        mat = np.zeros((dim, dim), dtype=complex)
        for br in self.branches:
            v = br.amplitudes.ravel()
            mat += np.outer(v, v.conj())
        return DensityOperator(
            matrix=mat, cutoff=self.cutoff, trace_deficit=self.deficit
        )


def _embed_and_split(state: TwoModeState) -> TwoModeState:
    """Enlarge the grid so every occupied sector is complete, then apply the
    input beam splitter.  With the enlarged grid the rotation spills nothing."""
    big = embed(state, 2 * state.cutoff - 1)
    return _apply_bs_pure(big, _BS_SIGNS["BS1"])


def propagate(
    input: TwoModeState,
    cfg: InterferometerConfig,
    branch_tol: float = 1e-12,
) -> PropagationResult:
    """Run a pure input state through the whole interferometer.

    Lossless configurations return a single pure branch.  Lossy ones
    enumerate Kraus branches in shells of total lost photons until the
    captured probability reaches ``1 - branch_tol``; each branch then passes
    through the closing beam splitter separately.
    """
    mid = _embed_and_split(input)
    mid = oam_phase(mid, cfg.theta_effective, cfg.L)
    c = mid.cutoff
    if cfg.lossless:
        out = _apply_bs_pure(mid, _BS_SIGNS["BS2"])
        branch = LossBranch(k_a=0, k_b=0, amplitudes=out.amplitudes)
        return PropagationResult(
            cutoff=c,
            branches=(branch,),
            captured=branch.weight,
            leakage=out.leakage,
        )
    fa = _kraus_factors(c, cfg.T_a)
    fb = _kraus_factors(c, cfg.T_b)
    amps = mid.amplitudes
    branches: list[LossBranch] = []
    captured = 0.0
    for shell in range(2 * c - 1):
        shell_weight = 0.0
        for k_a in range(min(shell, c - 1) + 1):
            k_b = shell - k_a
            if k_b > c - 1:
                continue
            na = c - k_a
            nb = c - k_b
            sub = (
                amps[k_a:, k_b:]
                * fa[k_a, k_a:][:, None]
                * fb[k_b, k_b:][None, :]
            )
            w = float(np.sum(np.abs(sub) ** 2))
            if w == 0.0:
                continue
            vec = np.zeros((c, c), dtype=complex)
            vec[:na, :nb] = sub
            out = _apply_bs_pure(
                TwoModeState(amplitudes=vec, leakage=0.0), _BS_SIGNS["BS2"]
            )
            branches.append(
                LossBranch(k_a=k_a, k_b=k_b, amplitudes=out.amplitudes)
            )
            shell_weight += w
        captured += shell_weight
        if 1.0 - captured < branch_tol:
            break
    return PropagationResult(
        cutoff=c,
        branches=tuple(branches),
        captured=captured,
        leakage=mid.leakage,
    )
