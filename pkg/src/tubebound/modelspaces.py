"""Model-space scenarios with exact laws.

Each scenario is an (ambient space, submanifold, start point) triple for
which some combination of Lyapunov pair, heat kernel, radial moments,
exponential moments and mean local time is available in closed form.
Operations return None where no closed form exists; that is a typed
"unavailable" answer, not a failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from scipy import integrate

from .errors import DomainError
from .specfun import laguerre, upper_gamma


@dataclass(frozen=True)
class EuclideanAffine:
    """R^m with N an affine subspace of dimension n; distance starts at r0."""

    m: int
    n: int
    r0: float = 0.0

    def __post_init__(self):
        if not 0 <= self.n <= self.m - 1:
            raise DomainError(f"need 0 <= n <= m-1, got m={self.m}, n={self.n}")
        if self.r0 < 0.0:
            raise DomainError(f"r0 must be non-negative, got {self.r0}")


@dataclass(frozen=True)
class CirclePoint:
    """Unit circle with N a single point at arc distance r0 from the start."""

    r0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.r0 <= math.pi:
            raise DomainError(f"circle r0 must lie in [0, pi], got {self.r0}")


@dataclass(frozen=True)
class HyperbolicH3Point:
    """3-dimensional hyperbolic space of curvature kappa < 0, N = start point."""

    kappa: float = -1.0
    r0: float = 0.0

    def __post_init__(self):
        if self.kappa >= 0.0:
            raise DomainError(f"kappa must be negative, got {self.kappa}")
        if self.r0 < 0.0:
            raise DomainError(f"r0 must be non-negative, got {self.r0}")


@dataclass(frozen=True)
class SphereInEuclidean:
    """R^m with N the sphere of the given radius; the walk starts at the centre."""

    m: int
    radius: float

    def __post_init__(self):
        if self.m < 2:
            raise DomainError(f"ambient dimension must be >= 2, got {self.m}")
        if self.radius <= 0.0:
            raise DomainError(f"radius must be positive, got {self.radius}")

    @property
    def r0(self) -> float:
        return self.radius


Scenario = Union[EuclideanAffine, CirclePoint, HyperbolicH3Point, SphereInEuclidean]


@dataclass(frozen=True)
class LyapunovParams:
    """Pair (nu, lam) with (1/2) Lap r_N^2 <= nu + lam r_N^2 off the cut locus.

    exact is True when the moment bounds built from the pair are attained.
    """

    nu: float
    lam: float
    exact: bool = False

    def __post_init__(self):
        if self.nu < 1.0:
            raise DomainError(f"nu must be >= 1, got {self.nu}")


def lyapunov_params(s: Scenario) -> LyapunovParams:
    """Lyapunov pair for a scenario.

    Affine case is an identity with nu = m - n. The hyperbolic point uses the
    Ricci-based quadratic estimate with lower bound R = 2 kappa, giving
    nu = 3, lam = -2 kappa / 3. The sphere absorbs its mean-curvature linear
    term c*r <= c(1 + r^2)/2 with c = (m-1)/radius.
    """
    if isinstance(s, EuclideanAffine):
        return LyapunovParams(nu=float(s.m - s.n), lam=0.0, exact=True)
    if isinstance(s, CirclePoint):
        return LyapunovParams(nu=1.0, lam=0.0, exact=False)
    if isinstance(s, HyperbolicH3Point):
        return LyapunovParams(nu=3.0, lam=-2.0 * s.kappa / 3.0, exact=False)
    if isinstance(s, SphereInEuclidean):
        c = (s.m - 1) / s.radius
        return LyapunovParams(nu=1.0 + c / 2.0, lam=c / 2.0, exact=False)
    raise TypeError(f"unknown scenario {s!r}")


def radial_laplacian_half_sq(s: Scenario, r: float) -> float:
    """Closed-form (1/2) Lap r_N^2 at distance r, maximized over branches.

    The sphere has two points at distance r < radius (inside and outside the
    shell); the outside branch dominates and is returned.
    """
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    if isinstance(s, EuclideanAffine):
        return float(s.m - s.n)
    if isinstance(s, CirclePoint):
        if r >= math.pi:
            raise DomainError("circle distance formula is smooth only on (0, pi)")
        return 1.0
    if isinstance(s, HyperbolicH3Point):
        a = math.sqrt(-s.kappa)
        return 1.0 + 2.0 * a * r / math.tanh(a * r)
    if isinstance(s, SphereInEuclidean):
        return 1.0 + (s.m - 1) * r / (s.radius + r)
    raise TypeError(f"unknown scenario {s!r}")


def _gaussian_odd_shift_mean(mu: float, var: float, q: int) -> float:
    # E[(mu + Z)^q] for Z ~ N(0, var) and odd q
    total = 0.0
    for j in range(0, q + 1, 2):
        dfact = math.prod(range(1, j, 2)) if j > 0 else 1
        total += math.comb(q, j) * mu ** (q - j) * dfact * var ** (j // 2)
    return total


def exact_moment(s: Scenario, p: int, t: float) -> Optional[float]:
    """Exact E[r_N^{2p}(X_t)] where available, else None.

    Affine: (2t)^p p! L^{(m-n)/2-1}_p(-r0^2/2t). Hyperbolic point (start at
    the pole): reduction of the radial integral to a one-dimensional Gaussian,
    E r^{2p} = E[(Z + a t)^{2p+1}] / (a t) with Z ~ N(0, t), a = sqrt(-kappa);
    for p = 1 this is 3t - kappa t^2. Circle: only the t -> inf limit pi^2/3.
    """
    if p < 1:
        raise DomainError(f"p must be a positive integer, got {p}")
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(s, EuclideanAffine):
        if math.isinf(t):
            return None
        d = s.m - s.n
        return (2.0 * t) ** p * math.factorial(p) * laguerre(p, d / 2.0 - 1.0, -s.r0**2 / (2.0 * t))
    if isinstance(s, HyperbolicH3Point):
        if math.isinf(t) or s.r0 != 0.0:
            return None
        a = math.sqrt(-s.kappa)
        return _gaussian_odd_shift_mean(a * t, t, 2 * p + 1) / (a * t)
    if isinstance(s, CirclePoint):
        if math.isinf(t) and p == 1:
            return math.pi**2 / 3.0
        return None
    return None


def exact_exp_moment(s: Scenario, theta: float, t: float) -> Optional[float]:
    """Exact E[exp(theta r_N^2(X_t) / 2)] where available, else None.

    Needs theta * t < 1 in both closed-form cases; theta = 0 is 1 everywhere.
    """
    if theta < 0.0:
        raise DomainError(f"theta must be non-negative, got {theta}")
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if theta == 0.0:
        return 1.0
    if isinstance(s, EuclideanAffine):
        if theta * t >= 1.0:
            raise DomainError(f"need theta*t < 1, got {theta * t}")
        d = s.m - s.n
        return (1.0 - theta * t) ** (-d / 2.0) * math.exp(
            theta * s.r0**2 / (2.0 * (1.0 - theta * t))
        )
    if isinstance(s, HyperbolicH3Point) and s.r0 == 0.0:
        if theta * t >= 1.0:
            raise DomainError(f"need theta*t < 1, got {theta * t}")
        return (1.0 - theta * t) ** -1.5 * math.exp(
            -theta * s.kappa * t**2 / (2.0 * (1.0 - theta * t))
        )
    return None


def heat_kernel(s: Scenario, t: float, r: float) -> Optional[float]:
    """Transition density at distance r from the start, where known in closed form.

    Hyperbolic: Theta^{-1/2} (2 pi t)^{-3/2} exp(-r^2/2t + kappa t/2) with
    Theta^{1/2} = sinh(a r)/(a r). Circle: wrapped Gaussian, summed until the
    added images fall below 1e-16 of the running total.
    """
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if r < 0.0:
        raise DomainError(f"r must be non-negative, got {r}")
    if isinstance(s, HyperbolicH3Point):
        a = math.sqrt(-s.kappa)
        u = a * r
        if u < 1e-8:
            theta_half = 1.0 - u * u / 6.0
        elif u > 700.0:
            return 0.0
        else:
            theta_half = u / math.sinh(u)
        return theta_half * (2.0 * math.pi * t) ** -1.5 * math.exp(
            -r * r / (2.0 * t) + s.kappa * t / 2.0
        )
    if isinstance(s, CirclePoint):
        if r > math.pi:
            raise DomainError(f"circle distance must lie in [0, pi], got {r}")
        return _wrapped_gaussian(t, r)
    return None


def _wrapped_gaussian(t: float, r: float) -> float:
    # sum of Gaussian images over 2 pi k shifts, truncated at 1e-16 relative
    norm = 1.0 / math.sqrt(2.0 * math.pi * t)
    total = math.exp(-r * r / (2.0 * t))
    k = 1
    while True:
        add = math.exp(-((r + 2.0 * math.pi * k) ** 2) / (2.0 * t)) + math.exp(
            -((r - 2.0 * math.pi * k) ** 2) / (2.0 * t)
        )
        total += add
        if add <= 1e-16 * total:  # also ends the all-underflow case, total == 0
            return norm * total
        k += 1


def revuz_mean_local_time(s: Scenario, t: float) -> Optional[float]:
    """Mean local time E[L^N_t] where the Revuz route gives a closed form.

    Sphere shell in R^m from the centre: radius * Gamma(m/2-1, radius^2/2t) /
    Gamma(m/2). Circle point: integral of the wrapped-Gaussian kernel at
    distance r0 over [0, t], by adaptive quadrature.
    """
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if isinstance(s, SphereInEuclidean):
        a = s.m / 2.0 - 1.0
        x = s.radius**2 / (2.0 * t)
        return s.radius * upper_gamma(a, x) / math.gamma(s.m / 2.0)
    if isinstance(s, CirclePoint):
        val, _ = integrate.quad(
            lambda u: _wrapped_gaussian(u, s.r0), 0.0, t, limit=400, epsabs=1e-12, epsrel=1e-10
        )
        return val
    return None


_KIND_NAMES = {
    EuclideanAffine: "flat",
    CirclePoint: "circle",
    HyperbolicH3Point: "h3",
    SphereInEuclidean: "sphere",
}


def scenario_to_kv(s: Scenario) -> dict[str, str]:
    """Flat key-value form of a scenario, as used by the CLI config."""
    if isinstance(s, EuclideanAffine):
        return {"kind": "flat", "m": str(s.m), "n": str(s.n), "r0": repr(s.r0)}
    if isinstance(s, CirclePoint):
        return {"kind": "circle", "r0": repr(s.r0)}
    if isinstance(s, HyperbolicH3Point):
        return {"kind": "h3", "kappa": repr(s.kappa), "r0": repr(s.r0)}
    if isinstance(s, SphereInEuclidean):
        return {"kind": "sphere", "m": str(s.m), "radius": repr(s.radius)}
    raise TypeError(f"unknown scenario {s!r}")


def scenario_from_kv(kv: dict[str, str]) -> Scenario:
    """Parse the flat key-value form; unknown keys are errors."""
    fields = dict(kv)
    kind = fields.pop("kind", None)
    if kind is None:
        raise DomainError("scenario needs a 'kind' key")
    allowed = {
        "flat": {"m", "n", "r0"},
        "circle": {"r0"},
        "h3": {"kappa", "r0"},
        "sphere": {"m", "radius"},
    }
    if kind not in allowed:
        raise DomainError(f"unknown scenario kind {kind!r}")
    extra = set(fields) - allowed[kind]
    if extra:
        raise DomainError(f"unknown scenario keys for kind={kind}: {sorted(extra)}")
    if kind == "flat":
        return EuclideanAffine(
            m=int(fields["m"]), n=int(fields["n"]), r0=float(fields.get("r0", 0.0))
        )
    if kind == "circle":
        return CirclePoint(r0=float(fields.get("r0", 0.0)))
    if kind == "h3":
        return HyperbolicH3Point(
            kappa=float(fields.get("kappa", -1.0)), r0=float(fields.get("r0", 0.0))
        )
    return SphereInEuclidean(m=int(fields["m"]), radius=float(fields["radius"]))
