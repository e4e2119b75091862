"""Samplers for the distance process r_N(X_t) on the model scenarios.

Endpoint laws are exact everywhere (the hyperbolic one by rejection);
pathwise sampling is exact except on H^3, where a geodesic random walk of
weak order one is provided for cross-checks only.

Random streams are counter-based: stream(seed, k) is the Philox generator
jumped k blocks, so path k is reproducible independently of how many
workers consume the path range.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import DomainError, SamplerError
from .modelspaces import (
    CirclePoint,
    EuclideanAffine,
    HyperbolicH3Point,
    Scenario,
    SphereInEuclidean,
)

_REJECTION_CAP = 10**6

DUMP_MAGIC = b"TBND"
DUMP_VERSION = 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator number `index` derived from a master seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)).jumped(index))


@dataclass(frozen=True)
class PathSample:
    """Distance process on a uniform grid: values[k] = r_N(X_{k dt})."""

    dt: float
    values: np.ndarray
    scenario: Scenario
    seed: int

    def __post_init__(self):
        if self.dt <= 0.0:
            raise DomainError(f"dt must be positive, got {self.dt}")


def sample_distance(s: Scenario, t: float, rng: np.random.Generator) -> float:
    """One exact draw of r_N(X_t)."""
    return float(sample_distances(s, t, rng, 1)[0])


def sample_distances(s: Scenario, t: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized exact draws of r_N(X_t)."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t}")
    if size < 1:
        raise DomainError(f"size must be positive, got {size}")
    sd = math.sqrt(t)
    if isinstance(s, EuclideanAffine):
        d = s.m - s.n
        g = sd * rng.standard_normal((size, d))
        g[:, 0] += s.r0
        return np.linalg.norm(g, axis=1)
    if isinstance(s, CirclePoint):
        angle = s.r0 + sd * rng.standard_normal(size)
        return np.abs(_wrap_angle(angle))
    if isinstance(s, SphereInEuclidean):
        g = sd * rng.standard_normal((size, s.m))
        return np.abs(np.linalg.norm(g, axis=1) - s.radius)
    if isinstance(s, HyperbolicH3Point):
        if s.r0 != 0.0:
            raise SamplerError("hyperbolic endpoint sampling starts at the pole (r0 = 0)")
        return _h3_endpoint_batch(s.kappa, t, size, rng)
    raise TypeError(f"unknown scenario {s!r}")


def _wrap_angle(angle: np.ndarray) -> np.ndarray:
    return np.mod(angle + math.pi, 2.0 * math.pi) - math.pi


def _h3_endpoint_batch(kappa: float, t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Rejection sampler for the radial law r sinh(a r) exp(-r^2/2t) dr.

    Splitting sinh leaves the target proportional to
    r (1 - e^{-2 a r}) exp(-(r - a t)^2 / 2t) on r > 0. The linear factor is
    enveloped by r <= e^{delta r} / (e delta), which tilts the Gaussian mean
    to a t + delta t; a draw r from the positive part of
    N(a t + delta t, t) is then accepted with probability
    e delta r e^{-delta r} (1 - e^{-2 a r}) <= 1.
    delta = 1/(a t + sqrt t) keeps the acceptance rate near 0.5 for
    moderate times.
    """
    a = math.sqrt(-kappa)
    mu = a * t
    delta = 1.0 / (mu + math.sqrt(t))
    mean = mu + delta * t
    sd = math.sqrt(t)
    out = np.empty(size)
    filled = 0
    proposals = 0
    cap = max(_REJECTION_CAP, 60 * size)
    while filled < size:
        k = max(2 * (size - filled), 64)
        proposals += k
        if proposals > cap:
            raise SamplerError(
                f"hyperbolic rejection sampler exceeded {cap} proposals at t={t}"
            )
        r = mean + sd * rng.standard_normal(k)
        u = rng.random(k)
        pos = r > 0.0
        r = r[pos]
        u = u[pos]
        accept = u < math.e * delta * r * np.exp(-delta * r) * (-np.expm1(-2.0 * a * r))
        acc = r[accept]
        take = min(size - filled, acc.size)
        out[filled : filled + take] = acc[:take]
        filled += take
    return out


def sample_path(s: Scenario, dt: float, T: float, seed: int, index: int = 0) -> PathSample:
    """Discretized trajectory of r_N(X) on the grid k*dt, k = 0..round(T/dt).

    Gaussian increments make the flat, sphere and circle paths exact at grid
    times. The hyperbolic path is a geodesic random walk (weak order one;
    cross-check use only). `index` selects the per-path random stream.
    """
    if dt <= 0.0 or dt > T:
        raise DomainError(f"need 0 < dt <= T, got dt={dt}, T={T}")
    steps = int(round(T / dt))
    rng = stream(seed, index)
    sd = math.sqrt(dt)
    if isinstance(s, EuclideanAffine):
        d = s.m - s.n
        inc = sd * rng.standard_normal((steps, d))
        pos = np.vstack([np.zeros((1, d)), np.cumsum(inc, axis=0)])
        pos[:, 0] += s.r0
        values = np.linalg.norm(pos, axis=1)
    elif isinstance(s, SphereInEuclidean):
        inc = sd * rng.standard_normal((steps, s.m))
        pos = np.vstack([np.zeros((1, s.m)), np.cumsum(inc, axis=0)])
        values = np.abs(np.linalg.norm(pos, axis=1) - s.radius)
    elif isinstance(s, CirclePoint):
        inc = sd * rng.standard_normal(steps)
        angle = s.r0 + np.concatenate([[0.0], np.cumsum(inc)])
        values = np.abs(_wrap_angle(angle))
    elif isinstance(s, HyperbolicH3Point):
        values = _h3_walk(s.kappa, s.r0, dt, steps, rng)
    else:
        raise TypeError(f"unknown scenario {s!r}")
    return PathSample(dt=dt, values=values, scenario=s, seed=seed)


def _h3_walk(kappa: float, r0: float, dt: float, steps: int, rng: np.random.Generator) -> np.ndarray:
    # geodesic random walk: tangent Gaussian step, distance updated by the
    # hyperbolic law of cosines in the radial/transverse decomposition
    a = math.sqrt(-kappa)
    v = math.sqrt(dt) * rng.standard_normal((steps, 3))
    lengths = np.linalg.norm(v, axis=1)
    radial = v[:, 0]
    values = np.empty(steps + 1)
    values[0] = r0
    r = r0
    for k in range(steps):
        ell = lengths[k]
        if ell == 0.0:
            values[k + 1] = r
            continue
        u = a * r
        w = a * ell
        if u > 700.0 or w > 700.0:
            raise SamplerError("geodesic walk left the numerically safe region")
        arg = math.cosh(u) * math.cosh(w) + math.sinh(u) * math.sinh(w) * (radial[k] / ell)
        r = math.acosh(max(arg, 1.0)) / a
        values[k + 1] = r
    return values


def write_path_dump(path: PathSample, fh: BinaryIO) -> None:
    """Binary dump: magic TBND, version u32, count u64, dt f64, then f64 values."""
    fh.write(DUMP_MAGIC)
    fh.write(struct.pack("<IQd", DUMP_VERSION, len(path.values), path.dt))
    fh.write(np.asarray(path.values, dtype="<f8").tobytes())


def read_path_dump(fh: BinaryIO) -> tuple[float, np.ndarray]:
    """Read a dump written by write_path_dump; returns (dt, values)."""
    magic = fh.read(4)
    if magic != DUMP_MAGIC:
        raise DomainError(f"bad magic {magic!r}, expected {DUMP_MAGIC!r}")
    version, count, dt = struct.unpack("<IQd", fh.read(20))
    if version != DUMP_VERSION:
        raise DomainError(f"unsupported dump version {version}")
    values = np.frombuffer(fh.read(8 * count), dtype="<f8")
    if values.size != count:
        raise DomainError(f"truncated dump: expected {count} values, got {values.size}")
    return dt, values
