"""Closed-form parity signals and sensitivities for the symmetric states.

These are pure scalar functions of ``z = tanh(r)``, the signal phase, the
OAM number and (for the lossy forms) the arm transmittances.  They serve as
the analytic oracle for the numeric Fock engine: every function here is
required to agree with the engine at converged cutoff to better than 1e-6,
and the repository tests enforce that bound on dense theta grids.

All formulas assume the default GEARED bias of pi/2 and squeezing angle 0,
for which the signal depends on theta only through ``Phi = L (pi + 2 theta)``.
Writing ``y = z^2`` and ``x = cos Phi``, the common building block is

    B = 1 + y^2 + 2 y x,

which is bounded below by (1 - y)^2 > 0, so none of the denominators here
can vanish for z < 1.  Polynomials are evaluated in Horner-style grouped
form to limit cancellation as z approaches 1.

Error budget: with double precision the grouped polynomials lose at most a
few hundred ulp to cancellation at y ~ 0.64 (r ~ 1.096); the dominant error
in any cross-check is the engine's truncation, not these formulas, which is
why the 1e-6 gates are comfortable.

TRANSCRIPTION.md in the repository root records, token by token, how these
expressions relate to the printed source material they transcribe, including
the repairs that validation forced and the replacements used where the
printed text could not be repaired.
"""

from __future__ import annotations

import math

from .errors import DegenerateState, DerivativeVanished, InvalidTransmittance

__all__ = [
    "parity_psa11",
    "sens_psa11",
    "parity_pas11",
    "sens_pas11",
    "parity_ps11_lossy",
    "parity_tmsv",
    "parity_tmsv_lossy",
    "parity_ps11",
    "parity_pa11",
]

_Z_FLOOR = 1e-6


def _check_z(z: float) -> None:
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    if z < _Z_FLOOR:
        raise DegenerateState(
            f"state norm vanishes as z -> 0 (z = {z:g} below {_Z_FLOOR:g})"
        )


def _check_t(name: str, t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise InvalidTransmittance(f"{name} = {t} outside [0, 1]")


def _phi(theta: float, L: int) -> float:
    return L * (math.pi + 2.0 * theta)


def _fringe_base(y: float, x: float) -> float:
    """B = 1 + y^2 + 2 y x, always >= (1 - y)^2."""
    return 1.0 + y * (y + 2.0 * x)


def _quartic_sub_add(t: float, x: float) -> float:
    """Degree-8 signal polynomial of the subtract-then-add state, P(t, x)."""
    x2 = x * x
    c7 = 7.0 * x
    c6 = 9.0 * x2 - 36.0
    c5 = (21.0 - 2.0 * x2) * x
    c4 = (x2 - 42.0) * x2 + 60.0
    c3 = (18.0 * x2 - 45.0) * x
    c2 = 15.0 * x2 - 8.0
    acc = t + c7
    acc = acc * t + c6
    acc = acc * t + c5
    acc = acc * t + c4
    acc = acc * t + c3
    acc = acc * t + c2
    acc = acc * t + x
    return acc * t


def _quartic_sub_add_dx(t: float, x: float) -> float:
    """d/dx of the polynomial above."""
    x2 = x * x
    acc = 7.0 * t + 18.0 * x
    acc = acc * t + (21.0 - 6.0 * x2)
    acc = acc * t + (4.0 * x2 - 84.0) * x
    acc = acc * t + (54.0 * x2 - 45.0)
    acc = acc * t + 30.0 * x
    acc = acc * t + 1.0
    return acc * t


def _quartic_add_sub(t: float, x: float) -> float:
    """Degree-8 signal polynomial of the add-then-subtract state (the degree
    mirror of the subtract-then-add one)."""
    x2 = x * x
    c7 = x
    c6 = 15.0 * x2 - 8.0
    c5 = (18.0 * x2 - 45.0) * x
    c4 = (x2 - 42.0) * x2 + 60.0
    c3 = (21.0 - 2.0 * x2) * x
    c2 = 9.0 * x2 - 36.0
    c1 = 7.0 * x
    acc = c7
    acc = acc * t + c6
    acc = acc * t + c5
    acc = acc * t + c4
    acc = acc * t + c3
    acc = acc * t + c2
    acc = acc * t + c1
    return acc * t + 1.0


def _quartic_add_sub_dx(t: float, x: float) -> float:
    x2 = x * x
    acc = t + 30.0 * x
    acc = acc * t + (54.0 * x2 - 45.0)
    acc = acc * t + (4.0 * x2 - 84.0) * x
    acc = acc * t + (21.0 - 6.0 * x2)
    acc = acc * t + 18.0 * x
    acc = acc * t + 7.0
    return acc * t


def _norm_quartic(y: float) -> float:
    """(1 + y)(1 + 10 y + y^2) = 1 + 11 y + 11 y^2 + y^3, the normalization
    polynomial shared by the two order-1 add/subtract states."""
    return (1.0 + y) * (1.0 + y * (10.0 + y))


def parity_psa11(z: float, theta: float, L: int) -> float:
    """Parity signal of the order-1 subtract-then-add state, lossless."""
    _check_z(z)
    y = z * z
    x = math.cos(_phi(theta, L))
    b = _fringe_base(y, x)
    return (
        _quartic_sub_add(-y, x)
        * (1.0 - y) ** 5
        / (y * _norm_quartic(y) * b**4.5)
    )


def parity_pas11(z: float, theta: float, L: int) -> float:
    """Parity signal of the order-1 add-then-subtract state, lossless."""
    _check_z(z)
    y = z * z
    x = math.cos(_phi(theta, L))
    b = _fringe_base(y, x)
    return (
        _quartic_add_sub(-y, x) * (1.0 - y) ** 5 / (_norm_quartic(y) * b**4.5)
    )


def _sens_from_parts(parity: float, d_parity: float, sin_phi: float) -> float:
    if d_parity == 0.0:
        if abs(sin_phi) < 1e-15:
            raise DerivativeVanished("signal slope vanishes at a fringe extremum")
        return math.inf
    variance = max(1.0 - parity * parity, 0.0)
    return math.sqrt(variance) / abs(d_parity)


def sens_psa11(z: float, theta: float, L: int) -> float:
    """Phase uncertainty of the subtract-then-add state's parity fringe.

    Evaluates sqrt(1 - P^2)/|dP/dtheta| with the derivative taken in closed
    form; diverges (DerivativeVanished) where sin(L(pi + 2 theta)) = 0.
    """
    _check_z(z)
    y = z * z
    phi = _phi(theta, L)
    x = math.cos(phi)
    s = math.sin(phi)
    b = _fringe_base(y, x)
    if abs(s) < 1e-15:
        raise DerivativeVanished("fringe extremum: sin(L(pi + 2 theta)) = 0")
    p = _quartic_sub_add(-y, x) * (1.0 - y) ** 5 / (y * _norm_quartic(y) * b**4.5)
    bracket = _quartic_sub_add_dx(-y, x) * b - 9.0 * y * _quartic_sub_add(-y, x)
    dp = -2.0 * L * s * (1.0 - y) ** 5 * bracket / (y * _norm_quartic(y) * b**5.5)
    return _sens_from_parts(p, dp, s)


def sens_pas11(z: float, theta: float, L: int) -> float:
    """Phase uncertainty of the add-then-subtract state's parity fringe."""
    _check_z(z)
    y = z * z
    phi = _phi(theta, L)
    x = math.cos(phi)
    s = math.sin(phi)
    b = _fringe_base(y, x)
    if abs(s) < 1e-15:
        raise DerivativeVanished("fringe extremum: sin(L(pi + 2 theta)) = 0")
    p = _quartic_add_sub(-y, x) * (1.0 - y) ** 5 / (_norm_quartic(y) * b**4.5)
    bracket = _quartic_add_sub_dx(-y, x) * b - 9.0 * y * _quartic_add_sub(-y, x)
    dp = -2.0 * L * s * (1.0 - y) ** 5 * bracket / (_norm_quartic(y) * b**5.5)
    return _sens_from_parts(p, dp, s)


def _lossy_base(y: float, x: float, t_a: float, t_b: float) -> float:
    """Lossy generalization of B; reduces to B at T_a = T_b = 1."""
    one = 1.0 - y
    return (
        one * one
        + y * one * (2.0 * (t_a + t_b) - t_a * t_a - t_b * t_b)
        + 2.0 * t_a * t_b * y * (x + y)
    )


def parity_tmsv(z: float, theta: float, L: int) -> float:
    """Parity signal of the two-mode squeezed vacuum, lossless."""
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    y = z * z
    x = math.cos(_phi(theta, L))
    return (1.0 - y) / math.sqrt(_fringe_base(y, x))


def parity_tmsv_lossy(
    z: float, theta: float, L: int, T_a: float, T_b: float
) -> float:
    """Parity signal of the two-mode squeezed vacuum with arm losses."""
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    _check_t("T_a", T_a)
    _check_t("T_b", T_b)
    y = z * z
    x = math.cos(_phi(theta, L))
    return (1.0 - y) / math.sqrt(_lossy_base(y, x, T_a, T_b))


def parity_ps11(z: float, theta: float, L: int) -> float:
    """Parity signal of the order-1 subtracted state, lossless."""
    _check_z(z)
    y = z * z
    x = math.cos(_phi(theta, L))
    b = _fringe_base(y, x)
    num = 1.0 + y * (x + y * ((x * x - 2.0) - y * x))
    return num * (1.0 - y) ** 3 / ((1.0 + y) * b**2.5)


def parity_pa11(z: float, theta: float, L: int) -> float:
    """Parity signal of the order-1 added state, lossless."""
    _check_z(z)
    y = z * z
    x = math.cos(_phi(theta, L))
    b = _fringe_base(y, x)
    num = -x + y * ((x * x - 2.0) + y * (x + y))
    return num * (1.0 - y) ** 3 / ((1.0 + y) * b**2.5)


def parity_ps11_lossy(
    z: float, theta: float, L: int, T_a: float, T_b: float
) -> float:
    """Parity signal of the order-1 subtracted state with arm losses.

    Exact for any combination of intensity transmittances, symmetric or not;
    reduces to :func:`parity_ps11` at ``T_a = T_b = 1``.
    """
    _check_z(z)
    _check_t("T_a", T_a)
    _check_t("T_b", T_b)
    y = z * z
    x = math.cos(_phi(theta, L))
    ta, tb = T_a, T_b
    q = ta * tb
    # denominator: lossy fringe base over 4 (1 - y)^2
    base = _lossy_base(y, x, ta, tb) / (4.0 * (1.0 - y) ** 2)
    # numerator: quadratic in x over 128 (1 - y)^2 (1 + y)
    a3 = (
        2.0 * ta**4
        + 4.0 * ta**3 * tb
        - 8.0 * ta**3
        + 4.0 * ta**2 * tb**2
        - 16.0 * ta**2 * tb
        + 14.0 * ta**2
        + 4.0 * ta * tb**3
        - 16.0 * ta * tb**2
        + 24.0 * q
        - 12.0 * ta
        + 2.0 * tb**4
        - 8.0 * tb**3
        + 14.0 * tb**2
        - 12.0 * tb
        + 4.0
    )
    a2 = (
        ta**4
        - 4.0 * ta**3
        + 2.0 * ta**2 * tb**2
        - 4.0 * ta**2 * tb
        - 4.0 * ta * tb**2
        - 8.0 * q
        + 8.0 * ta
        + tb**4
        - 4.0 * tb**3
        + 8.0 * tb
        - 4.0
    )
    a1 = -2.0 * ta**2 + 4.0 * ta - 2.0 * tb**2 + 4.0 * tb - 4.0
    c0 = ((a3 * y + a2) * y + a1) * y + 4.0
    hollow = ta * ta + tb * tb - 2.0 * ta - 2.0 * tb
    c1 = -4.0 * q * y * (y * (1.0 + y) * hollow + 2.0 * q * y * y + y * (y + 2.0) - 1.0)
    c2 = 4.0 * q * q * y * y
    num = ((c2 * x + c1) * x + c0) / (128.0 * (1.0 - y) ** 2 * (1.0 + y))
    return num / base**2.5
