"""Grid bookkeeping: ladder operators, embedding, reductions."""

import numpy as np
import pytest

import _oracles as oracle
from oam_mzi import (
    LeakageExceeded,
    Mode,
    TwoModeState,
    ZeroNorm,
    apply_annihilation,
    apply_creation,
    basis_state,
    embed,
    joint_index,
    normalize,
    pure_density,
    reduced_density,
    vacuum,
)


def random_state(cutoff: int, seed: int, pad: int = 0) -> TwoModeState:
    """Normalized random amplitudes, optionally zero on the top ``pad`` levels."""
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(cutoff, cutoff)) + 1j * rng.normal(size=(cutoff, cutoff))
    if pad:
        amps[cutoff - pad :, :] = 0.0
        amps[:, cutoff - pad :] = 0.0
    amps /= np.linalg.norm(amps)
    return TwoModeState(amps)


def test_joint_index_row_major():
    assert joint_index(0, 0, 8) == 0
    assert joint_index(2, 3, 8) == 2 * 8 + 3
    assert joint_index(7, 7, 8) == 63


def test_vacuum_and_basis_states():
    v = vacuum(6)
    assert v.amplitudes[0, 0] == 1.0
    assert v.norm() == pytest.approx(1.0)
    st = basis_state(2, 4, 6)
    assert st.amplitudes[2, 4] == 1.0
    assert np.count_nonzero(st.amplitudes) == 1
    with pytest.raises(ValueError):
        basis_state(6, 0, 6)


@pytest.mark.parametrize("mode", [Mode.A, Mode.B])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ladder_matches_dense_operators(mode, seed):
    c = 9
    st = random_state(c, seed, pad=2)
    A, B = oracle.joint_ops(c)
    dense = A if mode is Mode.A else B

    created = apply_creation(st, mode)
    expect = dense.conj().T @ st.amplitudes.reshape(-1)
    assert np.allclose(created.amplitudes.reshape(-1), expect, atol=1e-13)

    destroyed = apply_annihilation(st, mode)
    expect = dense @ st.amplitudes.reshape(-1)
    assert np.allclose(destroyed.amplitudes.reshape(-1), expect, atol=1e-13)


def test_commutator_identity_on_interior():
    """[a, a^dag] acts as the identity on states clear of the boundary."""
    st = random_state(10, 7, pad=2)
    for mode in (Mode.A, Mode.B):
        forward = apply_annihilation(apply_creation(st, mode), mode)
        backward = apply_creation(apply_annihilation(st, mode), mode)
        diff = forward.amplitudes - backward.amplitudes
        assert np.allclose(diff, st.amplitudes, atol=1e-12)


def test_creation_spill_is_tracked_and_gated():
    st = basis_state(5, 0, 6)
    lifted = apply_creation(st, Mode.A)
    # the raised component sqrt(6)|6,0> has nowhere to go; its squared
    # weight (6 here) is logged relative to the input norm
    assert lifted.leakage == pytest.approx(6.0)
    assert lifted.norm() == 0.0
    with pytest.raises(LeakageExceeded):
        apply_creation(st, Mode.A, leak_tol=1e-6)


def test_normalize_returns_norm_and_flags_zero():
    st = TwoModeState(0.5 * basis_state(1, 1, 4).amplitudes)
    out, norm = normalize(st)
    assert norm == pytest.approx(0.5)
    assert out.norm() == pytest.approx(1.0)
    with pytest.raises(ZeroNorm):
        normalize(TwoModeState(np.zeros((4, 4), dtype=complex)))


def test_embed_preserves_amplitudes():
    st = random_state(6, 11)
    big = embed(st, 13)
    assert big.cutoff == 13
    assert np.allclose(big.amplitudes[:6, :6], st.amplitudes)
    assert big.amplitudes[6:, :].max() == 0.0


def test_reduced_density_of_bell_pair():
    amps = np.zeros((5, 5), dtype=complex)
    amps[0, 0] = amps[1, 1] = 1.0 / np.sqrt(2.0)
    st = TwoModeState(amps)
    for mode in (Mode.A, Mode.B):
        rho = reduced_density(st, mode)
        assert rho.trace() == pytest.approx(1.0)
        assert rho.matrix[0, 0] == pytest.approx(0.5)
        assert rho.matrix[1, 1] == pytest.approx(0.5)
        assert abs(rho.matrix[0, 1]) < 1e-15


def test_reduced_density_agrees_with_einsum_partial_trace():
    st = random_state(7, 23)
    psi = st.amplitudes
    rho_a = np.einsum("nm,km->nk", psi, psi.conj())
    rho_b = np.einsum("mn,mk->nk", psi, psi.conj())
    assert np.allclose(reduced_density(st, Mode.A).matrix, rho_a, atol=1e-14)
    assert np.allclose(reduced_density(st, Mode.B).matrix, rho_b, atol=1e-14)


def test_pure_density_is_projector():
    st = random_state(5, 31)
    rho = pure_density(st)
    m = rho.matrix
    assert rho.trace() == pytest.approx(1.0)
    assert np.allclose(m @ m, m, atol=1e-12)
