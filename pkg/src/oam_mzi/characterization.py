"""State characterization: entanglement entropy, photon statistics, Wigner maps.

These tools look at states rather than interferometer outputs: how entangled
an input is, where its joint photon-number weight sits, and what its
single-mode reductions look like in phase space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import GridTooCoarse
from .fock import DensityOperator, Mode, TwoModeState, reduced_density

__all__ = [
    "JointDistribution",
    "WignerGridSpec",
    "WignerGrid",
    "entropy",
    "joint_distribution",
    "wigner",
]


@dataclass(frozen=True)
class JointDistribution:
    """Joint photon-number probabilities P(n_a, n_b) with the peak location."""

    probabilities: np.ndarray
    argmax: tuple[int, int]


@dataclass(frozen=True)
class WignerGridSpec:
    """Square phase-space grid: ``points`` samples per axis spanning
    ``[-extent, extent]`` in both quadrature directions."""

    extent: float
    points: int

    def __post_init__(self) -> None:
        if self.extent <= 0 or self.points < 2:
            raise ValueError("need positive extent and at least 2 points")

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.extent, self.extent, self.points)


@dataclass(frozen=True)
class WignerGrid:
    """Sampled Wigner function with its most negative value."""

    re_alpha: np.ndarray
    im_alpha: np.ndarray
    values: np.ndarray
    min_value: float


def _spectrum_entropy(rho: DensityOperator) -> float:
    lam = np.linalg.eigvalsh(rho.matrix)
    lam = lam[lam > 1e-14]  # noise floor below the representable spectrum
    return float(-np.sum(lam * np.log(lam)))


def entropy(state: TwoModeState) -> float:
    """Von Neumann entanglement entropy of a pure two-mode state.

    Eigen-decomposes the reduced density operator of mode A; the mode-B
    computation must agree to 1e-9 (the spectra of the two reductions of a
    pure state coincide) and is verified on every call.
    """
    e_a = _spectrum_entropy(reduced_density(state, Mode.A))
    e_b = _spectrum_entropy(reduced_density(state, Mode.B))
    if abs(e_a - e_b) > 1e-9:
        raise AssertionError(
            f"mode entropies disagree: {e_a!r} vs {e_b!r}; state not pure "
            "or reduction is broken"
        )
    return e_a


def joint_distribution(state: TwoModeState) -> JointDistribution:
    """Joint photon-number distribution |<n, m|psi>|^2 and its peak."""
    probs = np.abs(state.amplitudes) ** 2
    flat = int(np.argmax(probs))
    return JointDistribution(
        probabilities=probs,
        argmax=(flat // state.cutoff, flat % state.cutoff),
    )


def _displacement(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff - 1)
    a = np.zeros((cutoff, cutoff), dtype=complex)
    a[n, n + 1] = np.sqrt(n + 1.0)
    return expm(alpha * a.conj().T - np.conjugate(alpha) * a)


def wigner(rho_single: DensityOperator, grid_spec: WignerGridSpec) -> WignerGrid:
    """Wigner function of a single-mode density operator on a square grid.

    Uses the displaced-parity form ``W(alpha) = (2/pi) sum_n (-1)^n
    <n|D(alpha)^dag rho D(alpha)|n>`` with the displacement built by
    truncated matrix exponential.  The operator is padded with enough Fock
    headroom for the largest displacement on the grid (|alpha|^2 plus a few
    standard deviations) so the truncated exponential stays unitary where it
    matters.

    The grid must resolve the fastest phase-space oscillation the state can
    carry: interference fringes of a state with mean photon number N have
    wavelength of order 1/sqrt(2N + 1), and a spacing above half that bound
    raises GridTooCoarse.
    """
    if rho_single.n_modes != 1:
        raise ValueError("wigner expects a single-mode density operator")
    c = rho_single.cutoff
    diag = np.real(np.diag(rho_single.matrix))
    n_mean = float(np.sum(diag * np.arange(c)))
    finest = 1.0 / (2.0 * math.sqrt(2.0 * n_mean + 1.0))
    if grid_spec.spacing > finest:
        raise GridTooCoarse(
            f"grid spacing {grid_spec.spacing:.3g} exceeds the resolvable "
            f"scale {finest:.3g} for mean photon number {n_mean:.3g}"
        )
    amax = math.sqrt(2.0) * grid_spec.extent
    # headroom must cover the state's own occupation plus the largest
    # displacement, otherwise the corners of the grid go inaccurate first
    cum = np.cumsum(diag)
    n_occ = int(np.searchsorted(cum, cum[-1] * (1.0 - 1e-12)))
    c_work = max(c, n_occ + int(math.ceil(amax * amax + 6.0 * amax)) + 6)
    rho = np.zeros((c_work, c_work), dtype=complex)
    rho[:c, :c] = rho_single.matrix
    signs = (-1.0) ** np.arange(c_work)
    axis = grid_spec.axis
    values = np.empty((grid_spec.points, grid_spec.points))
    for i, im in enumerate(axis):
        for j, re in enumerate(axis):
            d = _displacement(complex(re, im), c_work)
            v = rho @ d
            diag_disp = np.real(np.sum(d.conj() * v, axis=0))
            values[i, j] = (2.0 / math.pi) * float(signs @ diag_disp)
    return WignerGrid(
        re_alpha=axis.copy(),
        im_alpha=axis.copy(),
        values=values,
        min_value=float(values.min()),
    )
