"""Observables: parity signal, phase sensitivity, FWHM, photon number, QFI.

The workhorse here is :class:`ParityFringe`, a Fourier representation of the
parity signal.  After the input beam splitter the only theta dependence is a
diagonal phase, so the parity expectation is a finite trigonometric series in
the accumulated phase; building the series once makes whole theta sweeps and
finite-difference derivatives essentially free.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DerivativeVanished,
    NoPeak,
    TargetUnreachable,
    ZeroInformation,
)
from .fock import DensityOperator, TwoModeState, embed
from .interferometer import (
    BiasMode,
    InterferometerConfig,
    PropagationResult,
    _embed_and_split,
    _kraus_factors,
)
from .states import (
    DEFAULT_CUTOFF_CAP,
    OperatorConvention,
    StateSpec,
    build_state,
    choose_cutoff,
    diagonal_weights,
)

__all__ = [
    "SensitivityResult",
    "QfiResult",
    "ParityFringe",
    "parity_fringe",
    "parity_expectation",
    "sensitivity",
    "fwhm",
    "mean_photon",
    "invert_mean_photon",
    "qfi",
]

logger = logging.getLogger(__name__)

_DERIVATIVE_FLOOR = 1e-14
_CLAMP_LOG_TOL = 1e-9


@dataclass(frozen=True)
class SensitivityResult:
    """Parity signal and phase-estimation figures at one operating point."""

    theta: float
    parity: float
    d_parity_d_theta: float
    delta_theta: float
    fisher_classical: float


@dataclass(frozen=True)
class QfiResult:
    """Quantum Fisher information and the Cramer-Rao phase bound."""

    f_q: float
    qcrb: float


def _clamp_parity(value: float) -> float:
    if value > 1.0 or value < -1.0:
        if abs(value) - 1.0 > _CLAMP_LOG_TOL:
            logger.warning("parity %.17g outside [-1, 1]; clamping", value)
        else:
            logger.debug("parity %.17g clamped to [-1, 1]", value)
        return max(-1.0, min(1.0, value))
    return value


def parity_expectation(rho_or_branches: DensityOperator | PropagationResult) -> float:
    """Expectation of photon-number parity on output mode B.

    Accepts either a density operator or the branch decomposition that
    :func:`oam_mzi.interferometer.propagate` returns; both reduce to
    ``sum (-1)^(n_b) p(n_a, n_b)``.  The result is clamped to [-1, 1]
    (floating-point accumulation can overshoot by a few ulp).
    """
    if isinstance(rho_or_branches, PropagationResult):
        total = 0.0
        for br in rho_or_branches.branches:
            signs = (-1.0) ** np.arange(br.amplitudes.shape[1])
            total += float(np.sum(signs[None, :] * np.abs(br.amplitudes) ** 2))
        return _clamp_parity(total)
    rho = rho_or_branches
    diag = np.real(np.diag(rho.matrix)).reshape(rho.cutoff, rho.cutoff)
    signs = (-1.0) ** np.arange(rho.cutoff)
    return _clamp_parity(float(np.sum(signs[None, :] * diag)))


# ---------------------------------------------------------------------------
# Fourier fringe

class ParityFringe:
    """Parity signal as a finite cosine series in the accumulated phase.

    ``evaluate(theta)`` returns the same number as propagating the state and
    calling :func:`parity_expectation`, but the propagation cost is paid once
    per (state, L, loss) combination instead of once per theta.
    """

    def __init__(
        self,
        coefficients: np.ndarray,
        L: int,
        bias: float,
        bias_mode: BiasMode,
        captured: float,
        cutoff: int,
    ) -> None:
        self.coefficients = coefficients  # index d >= 0; full series pairs +-d
        self.L = L
        self.bias = bias
        self.bias_mode = bias_mode
        self.captured = captured
        self.cutoff = cutoff

    def _chi(self, theta: np.ndarray) -> np.ndarray:
        if self.bias_mode is BiasMode.GEARED:
            return self.L * (theta + self.bias)
        return self.L * theta + self.bias

    def evaluate(self, theta) -> np.ndarray | float:
        """Parity expectation at one theta or an array of thetas."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        chi = self._chi(th)
        d = np.arange(1, len(self.coefficients))
        phases = np.exp(-1j * np.outer(chi, d))
        vals = self.coefficients[0].real + 2.0 * (phases @ self.coefficients[1:]).real
        vals = np.clip(vals, -1.0, 1.0)
        return vals if np.ndim(theta) else float(vals[0])

    __call__ = evaluate

    def derivative(self, theta) -> np.ndarray | float:
        """Analytic d(parity)/d(theta); used as a cross-check on the
        finite-difference path."""
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        chi = self._chi(th)
        d = np.arange(1, len(self.coefficients))
        phases = np.exp(-1j * np.outer(chi, d))
        vals = 2.0 * (phases @ (-1j * d * self.L * self.coefficients[1:])).real
        return vals if np.ndim(theta) else float(vals[0])


def _diagonal_sums(w: np.ndarray) -> np.ndarray:
    """s[d] = sum_n w[n, n - d] for d = 0 .. q-1 (lower-triangle diagonals)."""
    q = w.shape[0]
    out = np.empty(q, dtype=complex)
    for d in range(q):
        out[d] = np.trace(w, offset=-d)
    return out


def parity_fringe(
    state: TwoModeState,
    cfg: InterferometerConfig,
    branch_tol: float = 1e-12,
) -> ParityFringe:
    """Build the cosine-series representation of the parity signal.

    Only ``L``, the transmittances and the bias mode of ``cfg`` matter; the
    series covers every theta at once.  Lossy configurations accumulate the
    series over Kraus branches, enumerated in shells of total photons lost
    until ``1 - branch_tol`` of the probability is captured.
    """
    mid = _embed_and_split(state)
    amps = mid.amplitudes
    c = mid.cutoff
    kernel = (-1j) ** np.arange(c)

    def accumulate(m: np.ndarray, g: np.ndarray) -> float:
        q = min(m.shape)
        w = m[:q, :q] * m[:q, :q].conj().T
        g[:q] += _diagonal_sums(w)
        return float(np.sum(np.abs(m) ** 2))

    g = np.zeros(c, dtype=complex)
    if cfg.lossless:
        captured = accumulate(amps, g)
    else:
        fa = _kraus_factors(c, cfg.T_a)
        fb = _kraus_factors(c, cfg.T_b)
        captured = 0.0
        for shell in range(2 * c - 1):
            for k_a in range(min(shell, c - 1) + 1):
                k_b = shell - k_a
                if k_b > c - 1:
                    continue
                sub = (
                    amps[k_a:, k_b:]
                    * fa[k_a, k_a:][:, None]
                    * fb[k_b, k_b:][None, :]
                )
                if not np.any(sub):
                    continue
                captured += accumulate(sub, g)
            if 1.0 - captured < branch_tol:
                break
    return ParityFringe(
        coefficients=g * kernel,
        L=cfg.L,
        bias=cfg.bias,
        bias_mode=cfg.bias_mode,
        captured=captured,
        cutoff=c,
    )


# ---------------------------------------------------------------------------
# sensitivity

def sensitivity(
    spec: StateSpec,
    cfg: InterferometerConfig,
    fd_step: float | None = None,
    *,
    leak_tol: float = 1e-9,
    cutoff: int | None = None,
    cutoff_cap: int = DEFAULT_CUTOFF_CAP,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
    branch_tol: float = 1e-12,
    unsquared_variance: bool = False,
) -> SensitivityResult:
    """Phase sensitivity of the parity measurement at ``cfg.theta``.

    The derivative is a central finite difference of step ``fd_step``
    (default ``1e-6 * max(1, |theta|)``).  The classical Fisher information
    of the binary parity outcome is ``F_C = (dP/dtheta)^2 / (1 - P^2)`` and
    the uncertainty ``delta_theta = sqrt(1 - P^2) / |dP/dtheta|``.

    ``unsquared_variance`` swaps in a variant normalization that uses
    ``1 - P`` instead of ``1 - P^2``; it exists for comparison plots only and
    is not a Fisher quantity.

    Raises
    ------
    DerivativeVanished
        If the derivative underflows while the signal sits at an extremum
        (both numerator and denominator of ``delta_theta`` degenerate).
        A vanishing derivative away from an extremum reports
        ``delta_theta = inf`` instead.
    """
    if fd_step is None:
        fd_step = 1e-6 * max(1.0, abs(cfg.theta))
    if fd_step <= 0:
        raise ValueError("fd_step must be positive")
    if cutoff is None:
        cutoff = choose_cutoff(spec, leak_tol, cutoff_cap, convention)
    state, _ = build_state(spec, cutoff, convention)
    fringe = parity_fringe(state, cfg, branch_tol)
    th = cfg.theta
    p0 = _clamp_parity(float(fringe.evaluate(th)))
    dp = float(
        (fringe.evaluate(th + fd_step) - fringe.evaluate(th - fd_step))
        / (2.0 * fd_step)
    )
    variance = max(1.0 - p0 * p0, 0.0)
    if abs(dp) < _DERIVATIVE_FLOOR:
        if variance < _DERIVATIVE_FLOOR:
            raise DerivativeVanished(
                f"signal pinned at an extremum near theta = {th:.6g}"
            )
        return SensitivityResult(
            theta=th,
            parity=p0,
            d_parity_d_theta=dp,
            delta_theta=math.inf,
            fisher_classical=0.0,
        )
    if unsquared_variance:
        variant = max(1.0 - p0, 0.0)
        delta = math.sqrt(variant) / abs(dp)
        fisher = dp * dp / variant if variant > 0 else math.inf
    elif variance == 0.0:
        delta = 0.0
        fisher = math.inf
    else:
        delta = math.sqrt(variance) / abs(dp)
        fisher = dp * dp / variance
    return SensitivityResult(
        theta=th,
        parity=p0,
        d_parity_d_theta=dp,
        delta_theta=delta,
        fisher_classical=fisher,
    )


# ---------------------------------------------------------------------------
# curve and state summaries

def fwhm(curve: list[tuple[float, float]]) -> float:
    """Full width at half maximum of the central peak of a sampled signal.

    The curve should cover one period with the peak in the interior.  The
    half level sits midway between the global maximum and the minimum over
    the period; crossings are located by linear interpolation.

    Raises NoPeak for a flat curve.
    """
    pts = sorted(curve)
    th = np.array([p[0] for p in pts], dtype=float)
    val = np.array([p[1] for p in pts], dtype=float)
    peak = float(val.max())
    base = float(val.min())
    if peak - base < 1e-12:
        raise NoPeak("signal is flat over the sampled period")
    half = 0.5 * (peak + base)
    i_pk = int(val.argmax())

    def cross(i: int, j: int) -> float:
        f = (half - val[i]) / (val[j] - val[i])
        return float(th[i] + f * (th[j] - th[i]))

    left = None
    for i in range(i_pk, 0, -1):
        if val[i - 1] <= half <= val[i]:
            left = cross(i - 1, i)
            break
    right = None
    for i in range(i_pk, len(val) - 1):
        if val[i + 1] <= half <= val[i]:
            right = cross(i + 1, i)
            break
    if left is None or right is None:
        raise NoPeak("half-maximum crossings not bracketed by the samples")
    return right - left


def mean_photon(state: TwoModeState) -> float:
    """Total mean photon number of a normalized two-mode state."""
    c = state.cutoff
    n = np.arange(c, dtype=float)
    weights = np.abs(state.amplitudes) ** 2
    return float(np.sum(weights * (n[:, None] + n[None, :])))


def mean_photon_of_spec(
    spec: StateSpec,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
) -> float:
    """Mean photon number from the exact 1-D weight sequence (no grid)."""
    da, db, w = diagonal_weights(spec, convention)
    p = np.abs(w) ** 2
    total = p.sum()
    if total == 0.0:
        return float(da + db)
    n = np.arange(len(w), dtype=float)
    return float(np.sum(p * (2 * n + da + db)) / total)


def invert_mean_photon(
    spec: StateSpec,
    target_N: float,
    r_max: float = 2.5,
    convention: OperatorConvention = OperatorConvention.SYMMETRIC,
) -> float:
    """Squeezing parameter at which the state reaches a mean photon number.

    The ``r`` field of ``spec`` is ignored; only the kind and operator orders
    matter.  ``N(r)`` is evaluated from the exact weight sums, checked for
    monotonic growth on a bracketing grid, and inverted by bisection to
    within 1e-8 in ``N``.

    Raises TargetUnreachable when the target lies below the ``r -> 0``
    intercept (e.g. 2 for PA11), coincides with an intercept whose limiting
    state degenerates to the zero vector (annihilation-first recipes lose
    all weight as ``r -> 0``), or lies beyond ``N(r_max)``.
    """

    def n_of(r: float) -> float:
        return mean_photon_of_spec(spec.with_r(r), convention)

    grid = np.linspace(0.0, r_max, 33)
    vals = [n_of(r) for r in grid]
    if any(b < a - 1e-12 for a, b in zip(vals, vals[1:])):
        raise AssertionError("mean photon number not monotonic in r")
    lo_val = vals[0]
    hi_val = vals[-1]
    if target_N < lo_val - 1e-12:
        raise TargetUnreachable(
            f"target {target_N:g} below the r->0 intercept {lo_val:g}"
        )
    if target_N > hi_val + 1e-12:
        raise TargetUnreachable(
            f"target {target_N:g} above N(r_max={r_max:g}) = {hi_val:g}"
        )
    lo, hi = 0.0, r_max
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(n_of(mid) - target_N) < 1e-8 and hi - lo < 1e-9:
            break
        if n_of(mid) < target_N:
            lo = mid
        else:
            hi = mid
    result = 0.5 * (lo + hi)
    _, _, w = diagonal_weights(spec.with_r(result), convention)
    if float(np.sqrt(np.sum(np.abs(w) ** 2))) < 1e-14:
        raise TargetUnreachable(
            f"target {target_N:g} is the degenerate r->0 limit of this "
            "recipe; the state there has no weight"
        )
    return result


# ---------------------------------------------------------------------------
# quantum Fisher information

def _apply_j2(psi: np.ndarray) -> np.ndarray:
    """J2 = (a^dag b - a b^dag) / (2i) acting on a padded amplitude grid."""
    c = psi.shape[0]
    n = np.arange(c, dtype=float)
    out = np.zeros_like(psi)
    # a^dag b term: |n+1, m-1> gets sqrt((n+1) m) from |n, m>
    src = psi[:-1, 1:] * np.sqrt((n[:-1] + 1)[:, None] * n[1:][None, :])
    out[1:, :-1] += src
    # -a b^dag term
    src = psi[1:, :-1] * np.sqrt(n[1:][:, None] * (n[:-1] + 1)[None, :])
    out[:-1, 1:] -= src
    return out / 2j


def qfi(input: TwoModeState) -> QfiResult:
    """Quantum Fisher information of phase encoding on a pure input state.

    Computes ``F_Q = 4 (  <J2^2> - <J2>^2 )`` with two applications of the
    angular-momentum component J2, then the quantum Cramer-Rao bound
    ``qcrb = 1 / sqrt(F_Q)``.

    Raises ZeroInformation when the variance vanishes (e.g. vacuum).
    """
    pad = embed(input, input.cutoff + 2)
    psi = pad.amplitudes
    j2psi = _apply_j2(psi)
    j2j2psi = _apply_j2(j2psi)
    exp_j2 = complex(np.vdot(psi.ravel(), j2psi.ravel()))
    exp_j2sq = complex(np.vdot(psi.ravel(), j2j2psi.ravel()))
    f_q = 4.0 * (exp_j2sq.real - abs(exp_j2) ** 2)
    if f_q < 1e-14:
        raise ZeroInformation("phase generator variance vanishes on this state")
    return QfiResult(f_q=f_q, qcrb=1.0 / math.sqrt(f_q))
