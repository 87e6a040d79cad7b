"""Parity fringe series, sensitivity, curve widths, photon sums, QFI."""

import math

import numpy as np
import pytest

import _oracles as oracle
from oam_mzi import (
    BiasMode,
    DerivativeVanished,
    InterferometerConfig,
    NoPeak,
    StateSpec,
    TargetUnreachable,
    ZeroInformation,
    build_state,
    embed,
    fwhm,
    invert_mean_photon,
    mean_photon_of_spec,
    oam_phase,
    parity_expectation,
    parity_fringe,
    propagate,
    qfi,
    sensitivity,
)

PSA11 = StateSpec.from_name("PSA11", 0.9)


# ---------------------------------------------------------------------------
# fringe series vs direct propagation


@pytest.mark.parametrize(
    "t_a,t_b,tol", [(1.0, 1.0, 1e-13), (0.6, 0.9, 1e-12)]
)
def test_fringe_matches_propagation(t_a, t_b, tol):
    state, _ = build_state(PSA11, 14)
    cfg0 = InterferometerConfig(theta=0.0, L=3, T_a=t_a, T_b=t_b)
    fringe = parity_fringe(state, cfg0)
    for theta in (-1.2, -0.3, 0.0, 0.45, 2.0):
        cfg = InterferometerConfig(theta=theta, L=3, T_a=t_a, T_b=t_b)
        want = parity_expectation(propagate(state, cfg))
        assert fringe.evaluate(theta) == pytest.approx(want, abs=tol)


def test_fringe_bias_modes_are_shifted_copies():
    state, _ = build_state(PSA11, 12)
    L, bias = 3, math.pi / 2
    geared = parity_fringe(
        state, InterferometerConfig(theta=0.0, L=L, bias=bias)
    )
    external = parity_fringe(
        state,
        InterferometerConfig(
            theta=0.0, L=L, bias=bias, bias_mode=BiasMode.EXTERNAL
        ),
    )
    for theta in (-0.8, 0.1, 0.7):
        # same accumulated phase: L(theta' + b) = L theta + b
        shifted = theta + bias / L - bias
        assert external.evaluate(theta) == pytest.approx(
            geared.evaluate(shifted), abs=1e-13
        )


def test_fringe_derivative_matches_finite_difference():
    state, _ = build_state(PSA11, 14)
    fringe = parity_fringe(state, InterferometerConfig(theta=0.0, L=3))
    h = 1e-6
    for theta in (-0.9, 0.05, 0.6):
        fd = (fringe.evaluate(theta + h) - fringe.evaluate(theta - h)) / (2 * h)
        assert fringe.derivative(theta) == pytest.approx(fd, abs=1e-7)


def test_fringe_is_periodic_in_accumulated_phase():
    state, _ = build_state(PSA11, 12)
    for L in (1, 4):
        fringe = parity_fringe(state, InterferometerConfig(theta=0.0, L=L))
        period = 2 * math.pi / L
        assert fringe.evaluate(0.3) == pytest.approx(
            fringe.evaluate(0.3 + period), abs=1e-12
        )


# ---------------------------------------------------------------------------
# sensitivity


def test_sensitivity_matches_manual_fringe_arithmetic():
    cfg = InterferometerConfig(theta=0.1, L=1)
    res = sensitivity(PSA11, cfg, fd_step=1e-6, cutoff=40)
    state, _ = build_state(PSA11, 40)
    fringe = parity_fringe(state, cfg)
    p = float(fringe.evaluate(0.1))
    dp = float(
        (fringe.evaluate(0.1 + 1e-6) - fringe.evaluate(0.1 - 1e-6)) / 2e-6
    )
    assert res.parity == pytest.approx(p, abs=1e-15)
    assert res.d_parity_d_theta == pytest.approx(dp, rel=1e-12)
    assert res.delta_theta == pytest.approx(
        math.sqrt(1 - p * p) / abs(dp), rel=1e-12
    )
    assert res.fisher_classical == pytest.approx(
        dp * dp / (1 - p * p), rel=1e-12
    )


def test_sensitivity_literal_variant_uses_one_minus_p():
    cfg = InterferometerConfig(theta=0.2, L=1)
    lit = sensitivity(PSA11, cfg, cutoff=40, unsquared_variance=True)
    std = sensitivity(PSA11, cfg, cutoff=40)
    p = std.parity
    assert lit.delta_theta == pytest.approx(
        std.delta_theta * math.sqrt((1 - p) / (1 - p * p)), rel=1e-10
    )


def test_sensitivity_raises_when_signal_is_pinned():
    # no photons at all: parity is identically one
    with pytest.raises(DerivativeVanished):
        sensitivity(StateSpec.from_name("TMSV", 0.0),
                    InterferometerConfig(theta=0.3), cutoff=8)


def test_sensitivity_reports_inf_for_flat_mixed_signal():
    # a fully opaque arm erases the phase dependence but leaves a mixed
    # output, so the uncertainty diverges instead of degenerating
    res = sensitivity(
        StateSpec.from_name("TMSV", 0.5),
        InterferometerConfig(theta=0.3, T_a=0.0),
        cutoff=12,
    )
    assert math.isinf(res.delta_theta)
    assert res.fisher_classical == 0.0
    assert abs(res.parity) < 1.0


# ---------------------------------------------------------------------------
# curve width


def test_fwhm_of_sampled_cosine_is_half_period():
    th = np.linspace(-math.pi, math.pi, 20001)
    width = fwhm(list(zip(th, np.cos(th))))
    assert width == pytest.approx(math.pi, rel=1e-6)


def test_fwhm_triangle_hand_value():
    # peak 1 at 0, base 0 at +-2: half level 0.5 crossed at +-1
    th = np.linspace(-2, 2, 401)
    val = 1 - np.abs(th) / 2
    assert fwhm(list(zip(th, val))) == pytest.approx(2.0, abs=1e-12)


def test_fwhm_rejects_flat_and_edge_peaked_curves():
    th = np.linspace(0, 1, 50)
    with pytest.raises(NoPeak):
        fwhm(list(zip(th, np.ones_like(th))))
    with pytest.raises(NoPeak):
        fwhm(list(zip(th, th)))  # monotonic: no right crossing


def test_fwhm_narrows_with_gearing():
    state, _ = build_state(PSA11, 30)
    widths = {}
    for L in (1, 3):
        fringe = parity_fringe(state, InterferometerConfig(theta=0.0, L=L))
        # only even harmonics survive for this state, so the fringe period
        # in theta is pi / L; odd gearing keeps a peak centred at zero
        period = math.pi / L
        th = np.linspace(-period / 2, period / 2, 4001)
        widths[L] = fwhm(list(zip(th, fringe.evaluate(th))))
    assert widths[3] == pytest.approx(widths[1] / 3, rel=1e-5)


# ---------------------------------------------------------------------------
# photon number


def test_invert_mean_photon_round_trips():
    spec = StateSpec.from_name("TMSV", 0.0)
    target = 2 * math.sinh(1.096) ** 2
    assert invert_mean_photon(spec, target) == pytest.approx(1.096, abs=1e-6)
    psa = StateSpec.from_name("PSA11", 0.0)
    r = invert_mean_photon(psa, 6.0)
    assert mean_photon_of_spec(psa.with_r(r)) == pytest.approx(6.0, abs=1e-7)


def test_invert_mean_photon_rejects_unreachable_targets():
    with pytest.raises(TargetUnreachable):
        invert_mean_photon(StateSpec.from_name("PA11", 0.0), 1.0)
    with pytest.raises(TargetUnreachable):
        invert_mean_photon(StateSpec.from_name("TMSV", 0.0), 1e6)


def test_invert_mean_photon_intercept_limits():
    # Creation-first recipes have a well-defined r -> 0 limit (a Fock state),
    # so asking for exactly the intercept returns a vanishing r that still
    # builds.  Annihilation-first recipes of order 2 lose all weight in that
    # limit and must refuse instead of handing back an unusable r.
    r = invert_mean_photon(StateSpec.from_name("PA22", 0.0), 4.0)
    state, _ = build_state(StateSpec.from_name("PA22", max(r, 1e-12)), 12)
    assert abs(state.amplitudes[2, 2]) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(TargetUnreachable):
        invert_mean_photon(StateSpec.from_name("PSA22", 0.0), 4.0)


# ---------------------------------------------------------------------------
# quantum Fisher information


def test_qfi_matches_dense_generator_moments():
    for name in ("TMSV", "PSA11"):
        state, _ = build_state(StateSpec.from_name(name, 0.8), 24)
        res = qfi(state)
        c = state.cutoff + 2
        A, B = oracle.joint_ops(c)
        j2 = (A.conj().T @ B - A @ B.conj().T) / 2j
        vec = embed(state, c).amplitudes.reshape(-1)
        m1 = np.real(np.vdot(vec, j2 @ vec))
        m2 = np.real(np.vdot(vec, j2 @ (j2 @ vec)))
        want = 4 * (m2 - m1 * m1)
        assert res.f_q == pytest.approx(want, rel=1e-10)
        assert res.qcrb == pytest.approx(1 / math.sqrt(want), rel=1e-10)


def test_qfi_rejects_vacuum():
    state, _ = build_state(StateSpec.from_name("TMSV", 0.0), 6)
    with pytest.raises(ZeroInformation):
        qfi(state)


def test_phase_shift_does_not_change_qfi():
    state, _ = build_state(PSA11, 20)
    rotated = oam_phase(state, 0.62, 2)
    assert qfi(rotated).f_q == pytest.approx(qfi(state).f_q, rel=1e-12)
