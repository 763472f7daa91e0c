"""Tail probabilities for the chi-square and F distributions.

Built on the regularized incomplete gamma and beta functions, evaluated by
their classic series / continued-fraction expansions (Lentz's method) to
absolute accuracy around 1e-14, so the statistics module carries no external
numerical dependency.
"""
from __future__ import annotations

import math

from .geometry import InputDomainError

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 500


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x) by power series (x < a+1)."""
    if x == 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) by continued fraction (x >= a+1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def reg_gamma_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a)."""
    if a <= 0:
        raise InputDomainError(f"shape a must be positive, got {a}")
    if x < 0:
        raise InputDomainError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def reg_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise InputDomainError(f"shapes must be positive, got a={a} b={b}")
    if x < 0 or x > 1:
        raise InputDomainError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def chi2_sf(x: float, dof: float) -> float:
    """Survival function P(X > x) of a chi-square with `dof` degrees of freedom."""
    if dof <= 0:
        raise InputDomainError(f"dof must be positive, got {dof}")
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return reg_gamma_upper(dof / 2.0, x / 2.0)


def f_sf(x: float, dof1: float, dof2: float) -> float:
    """Survival function P(F > x) of an F distribution with (dof1, dof2)."""
    if dof1 <= 0 or dof2 <= 0:
        raise InputDomainError(f"degrees of freedom must be positive, got ({dof1}, {dof2})")
    if x <= 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return reg_beta(dof2 / 2.0, dof1 / 2.0, dof2 / (dof2 + dof1 * x))
