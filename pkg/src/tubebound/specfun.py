"""Scalar special functions used by the geometric bounds.

Everything here is a pure function of its arguments; no shared state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.5772156649015329

_KUMMER_CAP = 100_000
_KUMMER_TOL = 1e-16
_GAMMA_TOL = 1e-15
_GAMMA_CAP = 10_000


@dataclass(frozen=True)
class ComparisonValues:
    """Values of the constant-curvature comparison functions at one (kappa, lam, t).

    s, c solve the Jacobi equation s'' + kappa*s = 0 with s(0)=0, c=s';
    g and f are the logarithmic derivatives of s/t and of c + lam*s.
    """

    s: float
    c: float
    g: float
    f: float


def comparison(kappa: float, lam: float, t: float) -> ComparisonValues:
    """Evaluate S, C, G and F at time t > 0.

    G and F come from closed-form derivatives, never finite differences.
    For kappa < 0 both are evaluated through tanh to stay finite for
    large sqrt(-kappa)*t.
    """
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if kappa > 0.0:
        rk = math.sqrt(kappa)
        v = rk * t
        s = math.sin(v) / rk
        c = math.cos(v)
        if s <= 0.0:
            raise DomainError(f"S_kappa({t}) = {s} <= 0 (need t < pi/sqrt(kappa))")
        denom = c + lam * s
        if denom <= 0.0:
            raise DomainError(f"C + lam*S = {denom} <= 0 at t={t}")
        g = rk * _cot_minus_inv(v)
        f = (-kappa * s + lam * c) / denom
    elif kappa == 0.0:
        s = t
        c = 1.0
        denom = 1.0 + lam * t
        if denom <= 0.0:
            raise DomainError(f"C + lam*S = {denom} <= 0 at t={t}")
        g = 0.0
        f = lam / denom
    else:
        a = math.sqrt(-kappa)
        u = a * t
        s = math.sinh(u) / a if u < 700.0 else math.inf
        c = math.cosh(u) if u < 700.0 else math.inf
        g = a * _coth_minus_inv(u)
        th = math.tanh(u)
        denom = 1.0 + (lam / a) * th
        if denom <= 0.0:
            raise DomainError(f"C + lam*S <= 0 at t={t} (lam={lam}, kappa={kappa})")
        f = (a * th + lam) / denom
    return ComparisonValues(s=s, c=c, g=g, f=f)


def _coth_minus_inv(u: float) -> float:
    # coth(u) - 1/u, stable near 0; tends to 1 as u -> inf
    if u < 1e-4:
        return u / 3.0 - u**3 / 45.0
    if u > 350.0:
        return 1.0 - 1.0 / u
    return 1.0 / math.tanh(u) - 1.0 / u


def _cot_minus_inv(v: float) -> float:
    # cot(v) - 1/v, stable near 0
    if v < 1e-4:
        return -v / 3.0 - v**3 / 45.0
    return 1.0 / math.tan(v) - 1.0 / v


def laguerre(p: int, alpha: float, z: float) -> float:
    """Generalized Laguerre polynomial L^alpha_p(z) by the three-term recurrence.

    Stable for the z <= 0 arguments the moment bounds use, where every
    recurrence term has the same sign.
    """
    if p < 0:
        raise DomainError(f"order must be non-negative, got {p}")
    if alpha <= -1.0:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    if p == 0:
        return 1.0
    lkm1 = 1.0
    lk = 1.0 + alpha - z
    for k in range(1, p):
        lkm1, lk = lk, ((2 * k + 1 + alpha - z) * lk - (k + alpha) * lkm1) / (k + 1)
    return lk


def kummer(a: float, b: float, z: float) -> float:
    """Confluent hypergeometric 1F1(a, b, z) by term-ratio series summation.

    Terminates when the running term drops below 1e-16 of the partial sum
    (two consecutive times, since terms first grow for large z) and raises
    ConvergenceError at the 1e5-term cap. Intended for z >= 0 or for
    polynomial cases (a a non-positive integer), where the series is safe.
    """
    if b <= 0.0 and b == int(b):
        raise DomainError(f"b must not be a non-positive integer, got {b}")
    term = 1.0
    total = 1.0
    small = 0
    for p in range(_KUMMER_CAP):
        term *= (a + p) * z / ((b + p) * (p + 1))
        total += term
        if not math.isfinite(total):
            raise ConvergenceError(f"1F1({a}, {b}, {z}) overflowed; z out of practical range")
        if abs(term) <= _KUMMER_TOL * abs(total):
            small += 1
            if small >= 2 or term == 0.0:
                return total
        else:
            small = 0
    raise ConvergenceError(
        f"1F1({a}, {b}, {z}) did not converge within {_KUMMER_CAP} terms"
    )


def upper_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma Gamma(a, x) = int_x^inf s^(a-1) e^(-s) ds, a, x >= 0.

    Series branch for small x, continued fraction for large x; a = 0 is the
    exponential integral E1(x) with its own series below x = 1.
    """
    if a < 0.0 or x < 0.0:
        raise DomainError(f"need a, x >= 0, got a={a}, x={x}")
    if a == 0.0:
        if x == 0.0:
            raise DomainError("Gamma(0, 0) diverges")
        if x < 1.0:
            return _exp1_series(x)
        return _gamma_cf(0.0, x)
    if x == 0.0:
        return math.gamma(a)
    if x < a + 1.0:
        # lower-gamma series, then complement
        return math.gamma(a) * (1.0 - _gamma_p_series(a, x))
    return _gamma_cf(a, x)


def _exp1_series(x: float) -> float:
    # E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k k!)
    total = -EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, _GAMMA_CAP):
        term *= -x / k
        contrib = -term / k
        total += contrib
        if abs(contrib) < _GAMMA_TOL * max(abs(total), 1e-300):
            return total
    raise ConvergenceError(f"E1 series failed at x={x}")


def _gamma_p_series(a: float, x: float) -> float:
    # regularized lower incomplete gamma P(a, x) for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_GAMMA_CAP):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_TOL:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ConvergenceError(f"P(a, x) series failed at a={a}, x={x}")


def _gamma_cf(a: float, x: float) -> float:
    # modified Lentz continued fraction for Gamma(a, x), valid for x >= ~1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_CAP):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_TOL:
            return math.exp(-x + a * math.log(x)) * h if a > 0.0 else math.exp(-x) * h
    raise ConvergenceError(f"Gamma(a, x) continued fraction failed at a={a}, x={x}")


def lemma_laguerre_rhs(p: int, alpha: float, z: float) -> float:
    """Envelope (12(1+z))^p Gamma(alpha+1+p) / Gamma(alpha+1) for p! L^alpha_p(-z).

    Computed in log space so p up to 50 cannot overflow intermediates.
    """
    if p < 0:
        raise DomainError(f"order must be non-negative, got {p}")
    if alpha < 0.0 or z < 0.0:
        raise DomainError(f"need alpha, z >= 0, got alpha={alpha}, z={z}")
    if p == 0:
        return 1.0
    logval = p * math.log(12.0 * (1.0 + z)) + math.lgamma(alpha + 1.0 + p) - math.lgamma(alpha + 1.0)
    return math.exp(logval)
