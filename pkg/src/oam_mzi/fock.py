"""Truncated two-mode Fock grid and elementary ladder-operator actions.

A pure two-mode state lives on a square grid of Fock amplitudes
``psi[n_a, n_b]`` with both occupation numbers below ``cutoff``.  When a
joint (flattened) index is needed, e.g. for density matrices, the row-major
convention ``n_a * cutoff + n_b`` is used everywhere.

Creation at the truncation boundary cannot be represented; the squared
weight that would land on level ``cutoff`` is dropped and accumulated in
``TwoModeState.leakage`` instead of erroring immediately.  A single leak
tolerance gate (``leak_tol`` arguments downstream) guards the pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import LeakageExceeded, ZeroNorm

_ZERO_NORM_TOL = 1e-14


class Mode(Enum):
    """The two interferometer rails."""

    A = 0
    B = 1


@dataclass(frozen=True)
class TwoModeState:
    """Pure state on the truncated grid.

    Attributes:
        amplitudes: complex array of shape ``(cutoff, cutoff)``, ``[n_a, n_b]``.
        leakage: accumulated squared-amplitude weight dropped at the
            truncation boundary, relative to the norm of the state at the
            time of each drop.
    """

    amplitudes: np.ndarray
    leakage: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 2 or amp.shape[0] != amp.shape[1]:
            raise ValueError(f"amplitudes must be a square grid, got shape {amp.shape}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    """Density matrix over one mode or the joint two-mode basis.

    For ``n_modes == 2`` the matrix is indexed by the flattened joint index
    ``n_a * cutoff + n_b``; for ``n_modes == 1`` directly by the occupation
    number.  ``trace_deficit`` records ``1 - Tr(rho)`` at construction time
    (truncation and dropped Kraus branches make the trace fall short).
    """

    matrix: np.ndarray
    cutoff: int
    n_modes: int = 2
    trace_deficit: float = 0.0

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = self.cutoff**self.n_modes
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match cutoff {self.cutoff} "
                f"with {self.n_modes} mode(s)"
            )
        object.__setattr__(self, "matrix", mat)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))


def joint_index(n_a: int, n_b: int, cutoff: int) -> int:
    """Flattened row-major index of ``|n_a, n_b>``."""
    return n_a * cutoff + n_b


def vacuum(cutoff: int) -> TwoModeState:
    amp = np.zeros((cutoff, cutoff), dtype=complex)
    amp[0, 0] = 1.0
    return TwoModeState(amp)


def basis_state(n_a: int, n_b: int, cutoff: int) -> TwoModeState:
    if not (0 <= n_a < cutoff and 0 <= n_b < cutoff):
        raise ValueError(f"|{n_a},{n_b}> does not fit below cutoff {cutoff}")
    amp = np.zeros((cutoff, cutoff), dtype=complex)
    amp[n_a, n_b] = 1.0
    return TwoModeState(amp)


def _axis(mode: Mode) -> int:
    return 0 if mode is Mode.A else 1


def apply_creation(
    state: TwoModeState, mode: Mode, leak_tol: float | None = None
) -> TwoModeState:
    """Apply the creation operator on one mode.

    ``a^dag |n> = sqrt(n+1) |n+1>`` as an index shift; the amplitude that
    would be raised onto level ``cutoff`` is dropped and its squared weight
    added to ``leakage``.  Raises :class:`LeakageExceeded` when a tolerance
    is given and the accumulated leakage passes it.
    """
    amp = state.amplitudes
    c = state.cutoff
    ax = _axis(mode)
    norm_sq = float(np.sum(np.abs(amp) ** 2))
    boundary = amp[c - 1, :] if ax == 0 else amp[:, c - 1]
    spilled = float(c * np.sum(np.abs(boundary) ** 2))
    spilled_rel = spilled / norm_sq if norm_sq > 0 else 0.0

    out = np.zeros_like(amp)
    coeff = np.sqrt(np.arange(1, c, dtype=float))
    if ax == 0:
        out[1:, :] = coeff[:, None] * amp[:-1, :]
    else:
        out[:, 1:] = coeff[None, :] * amp[:, :-1]

    leakage = state.leakage + spilled_rel
    if leak_tol is not None and leakage > leak_tol:
        raise LeakageExceeded(
            f"creation spilled {spilled_rel:.3e} past level {c - 1}; "
            f"accumulated leakage {leakage:.3e} > tolerance {leak_tol:.3e}"
        )
    return TwoModeState(out, leakage=leakage)


def apply_annihilation(state: TwoModeState, mode: Mode) -> TwoModeState:
    """Apply the annihilation operator on one mode (``a |n> = sqrt(n) |n-1>``).

    Exact on the truncated grid; leakage is carried through unchanged.
    """
    amp = state.amplitudes
    c = state.cutoff
    out = np.zeros_like(amp)
    coeff = np.sqrt(np.arange(1, c, dtype=float))
    if _axis(mode) == 0:
        out[:-1, :] = coeff[:, None] * amp[1:, :]
    else:
        out[:, :-1] = coeff[None, :] * amp[:, 1:]
    return TwoModeState(out, leakage=state.leakage)


def normalize(state: TwoModeState) -> tuple[TwoModeState, float]:
    """Return the unit-norm state and the norm that was divided out.

    Raises :class:`ZeroNorm` below ``1e-14``; leakage, being relative,
    carries over unchanged.
    """
    nrm = state.norm()
    if nrm < _ZERO_NORM_TOL:
        raise ZeroNorm(f"state norm {nrm:.3e} below {_ZERO_NORM_TOL:.0e}")
    return TwoModeState(state.amplitudes / nrm, leakage=state.leakage), nrm


def embed(state: TwoModeState, cutoff: int) -> TwoModeState:
    """Pad the grid with zeros up to a larger cutoff (identity on amplitudes)."""
    if cutoff < state.cutoff:
        raise ValueError(f"cannot shrink cutoff {state.cutoff} -> {cutoff}")
    amp = np.zeros((cutoff, cutoff), dtype=complex)
    amp[: state.cutoff, : state.cutoff] = state.amplitudes
    return TwoModeState(amp, leakage=state.leakage)


def pure_density(state: TwoModeState) -> DensityOperator:
    """Materialize ``|psi><psi|`` over the flattened joint basis."""
    vec = state.amplitudes.reshape(-1)
    mat = np.outer(vec, vec.conj())
    return DensityOperator(
        mat, cutoff=state.cutoff, n_modes=2, trace_deficit=1.0 - float(np.vdot(vec, vec).real)
    )


def reduced_density(
    source: TwoModeState | DensityOperator, keep: Mode
) -> DensityOperator:
    """Trace out one mode and return the single-mode reduced density matrix.

    For a pure state this is a single contraction of the amplitude grid;
    for a joint density operator, a partial trace over the flattened index.
    """
    if isinstance(source, TwoModeState):
        psi = source.amplitudes
        if keep is Mode.A:
            red = psi @ psi.conj().T
        else:
            red = psi.T @ psi.conj()
        cutoff = source.cutoff
    else:
        if source.n_modes != 2:
            raise ValueError("reduced_density needs a two-mode source")
        c = source.cutoff
        rho = source.matrix.reshape(c, c, c, c)
        if keep is Mode.A:
            red = np.einsum("ikjk->ij", rho)
        else:
            red = np.einsum("kikj->ij", rho)
        cutoff = c
    red = 0.5 * (red + red.conj().T)
    deficit = 1.0 - float(np.real(np.trace(red)))
    return DensityOperator(red, cutoff=cutoff, n_modes=1, trace_deficit=deficit)
