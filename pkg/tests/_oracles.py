"""Independent dense-matrix references used by the tests.

Everything here is built from explicit ladder operators on the flattened
joint space and scipy's expm, with no use of the package's sector
decompositions, Kraus factorizations, or fringe series.  Slow but direct.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def ladder(cutoff: int) -> np.ndarray:
    """Single-mode annihilation operator, a|n> = sqrt(n)|n-1>."""
    a = np.zeros((cutoff, cutoff))
    n = np.arange(1, cutoff)
    a[n - 1, n] = np.sqrt(n)
    return a


def joint_ops(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation operators of both modes on the joint (row-major) space."""
    a = ladder(cutoff)
    eye = np.eye(cutoff)
    return np.kron(a, eye), np.kron(eye, a)


def bs_matrix(cutoff: int, sign: int) -> np.ndarray:
    """exp[sign * i pi/4 (a^dag b + a b^dag)] on the joint space."""
    A, B = joint_ops(cutoff)
    h = A.conj().T @ B + A @ B.conj().T
    return expm(sign * 0.25j * np.pi * h)


def phase_matrix(cutoff: int, L: int, theta_eff: float) -> np.ndarray:
    """Opposite phases L*theta_eff/2 on the two arms (diagonal)."""
    n = np.arange(cutoff)
    diff = n[:, None] - n[None, :]
    return np.diag(np.exp(-0.5j * L * theta_eff * diff).reshape(-1))


def parity_b_diag(cutoff: int) -> np.ndarray:
    """Diagonal of (-1)^{n_b} on the joint space."""
    n = np.arange(cutoff)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    return np.tile(signs, cutoff)


def tmsv_vector(r: float, psi: float, cutoff: int) -> np.ndarray:
    """Two-mode squeezed vacuum via the exponentiated squeeze generator."""
    A, B = joint_ops(cutoff)
    xi = r * np.exp(1j * psi)
    gen = np.conj(xi) * (A @ B) - xi * (A.conj().T @ B.conj().T)
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    vec[0] = 1.0
    return expm(gen) @ vec


def mzi_parity(
    psi_vec: np.ndarray,
    cutoff: int,
    L: int,
    theta_eff: float,
) -> float:
    """Lossless interferometer then parity on mode b, all dense."""
    out = bs_matrix(cutoff, +1) @ phase_matrix(cutoff, L, theta_eff) @ (
        bs_matrix(cutoff, -1) @ psi_vec
    )
    return float(np.real(np.sum(parity_b_diag(cutoff) * np.abs(out) ** 2)))


def lossy_joint_channel(
    rho: np.ndarray, cutoff: int, T: float, arm: int, env_cutoff: int
) -> np.ndarray:
    """Two-mode version of :func:`lossy_mode_channel`.

    ``rho`` is a joint density matrix on the row-major (cutoff*cutoff) space;
    ``arm`` 0 couples mode a to the environment, 1 couples mode b.  Exact as
    long as the lossy arm never reaches either truncation ceiling.
    """
    a = ladder(cutoff)
    eye = np.eye(cutoff)
    joint = np.kron(a, eye) if arm == 0 else np.kron(eye, a)
    M = np.kron(joint, np.eye(env_cutoff))
    E = np.kron(np.eye(cutoff * cutoff), ladder(env_cutoff))
    angle = np.arccos(np.sqrt(T))
    u = expm(angle * (M.conj().T @ E - M @ E.conj().T))
    env = np.zeros((env_cutoff, env_cutoff))
    env[0, 0] = 1.0
    big = u @ np.kron(rho, env) @ u.conj().T
    big = big.reshape(cutoff * cutoff, env_cutoff, cutoff * cutoff, env_cutoff)
    return np.einsum("iaja->ij", big)


def lossy_mode_channel(rho: np.ndarray, T: float, env_cutoff: int) -> np.ndarray:
    """Single-mode pure-loss channel via an explicit environment.

    Couples the mode to a vacuum environment with a transmittance-T beam
    splitter and traces the environment out.  ``rho`` is a single-mode
    density matrix.
    """
    c = rho.shape[0]
    a = ladder(c)
    e = ladder(env_cutoff)
    A = np.kron(a, np.eye(env_cutoff))
    E = np.kron(np.eye(c), e)
    angle = np.arccos(np.sqrt(T))
    u = expm(angle * (A.conj().T @ E - A @ E.conj().T))
    env = np.zeros((env_cutoff, env_cutoff))
    env[0, 0] = 1.0
    big = u @ np.kron(rho, env) @ u.conj().T
    big = big.reshape(c, env_cutoff, c, env_cutoff)
    return np.einsum("iaja->ij", big)
