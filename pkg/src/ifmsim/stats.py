"""Confidence intervals, the special functions behind them, and seeded sampling.

Only the pieces the experiments need: exact binomial (Clopper-Pearson) and
Poisson (chi-squared method) intervals, the normal-approximation width, and
reproducible per-stream random draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

_PROB_TOL = 1e-9


@dataclass(frozen=True)
class Interval:
    lower: float
    upper: float
    coverage: float

    def __post_init__(self) -> None:
        if not 0.0 < self.coverage < 1.0:
            raise ValueError(f"coverage must be in (0, 1), got {self.coverage}")
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"need 0 <= lower <= upper, got [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    return float(special.betainc(a, b, x))


def inverse_regularized_incomplete_beta(a: float, b: float, p: float) -> float:
    """x such that I_x(a, b) = p; the Beta(a, b) quantile."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return float(special.betaincinv(a, b, p))


def chi_squared_quantile(p: float, dof: int) -> float:
    """Chi-squared quantile via the inverse regularized incomplete gamma."""
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if dof <= 0:
        raise ValueError("dof must be positive")
    if p == 0.0:
        return 0.0
    return float(2.0 * special.gammaincinv(dof / 2.0, p))


def normal_quantile(p: float) -> float:
    """Standard normal quantile, derived from the inverse error function."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    return float(math.sqrt(2.0) * special.erfinv(2.0 * p - 1.0))


def clopper_pearson(k: int, m: int, coverage: float = 0.95) -> Interval:
    """Exact (conservative) two-sided binomial interval for k successes of m.

    Boundary conventions: lower = 0 at k = 0 and upper = 1 at k = m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 <= k <= m:
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    tail = 0.5 * (1.0 - coverage)
    lower = 0.0 if k == 0 else inverse_regularized_incomplete_beta(k, m - k + 1, tail)
    upper = 1.0 if k == m else inverse_regularized_incomplete_beta(k + 1, m - k, 1.0 - tail)
    return Interval(lower, upper, coverage)


def poisson_interval(k: int, coverage: float = 0.95) -> Interval:
    """Two-sided chi-squared-method interval for a Poisson mean given count k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    tail = 0.5 * (1.0 - coverage)
    lower = 0.0 if k == 0 else 0.5 * chi_squared_quantile(tail, 2 * k)
    upper = 0.5 * chi_squared_quantile(1.0 - tail, 2 * k + 2)
    return Interval(lower, upper, coverage)


def normal_width_binomial(p: float, m: int, coverage: float = 0.95) -> float:
    """Normal-approximation width 2 z sqrt(p(1-p)/m) of a binomial interval.

    Not valid for p near 0 or 1, where it collapses to zero.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    z = normal_quantile(0.5 * (1.0 + coverage))
    return 2.0 * z * math.sqrt(p * (1.0 - p) / m)


@dataclass(frozen=True)
class RngSeed:
    """Addressable random stream: same (seed, stream_id) -> same sequence."""

    seed: int
    stream_id: int = 0

    def stream(self) -> np.random.Generator:
        return make_stream(self.seed, self.stream_id)


def make_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent counter-based stream keyed by (seed, stream_id)."""
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_bernoulli(rng: np.random.Generator, p: float, size: int | None = None):
    """0/1 draws with success probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    u = rng.random(size)
    return (u < p).astype(np.int64) if size is not None else int(u < p)

def sample_categorical3(rng: np.random.Generator, probs, size: int | None = None):
    """Draws from {0, 1, 2} with the given (normalized) probability triple."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (3,) or np.any(probs < -_PROB_TOL):
        raise ValueError("probs must be three non-negative values")
    if abs(float(probs.sum()) - 1.0) > _PROB_TOL:
        raise ValueError(f"probability vector not normalized: sum={probs.sum()!r}")
    cum = np.cumsum(np.clip(probs, 0.0, None))
    cum[-1] = 1.0
    u = rng.random(size)
    out = np.searchsorted(cum, u, side="right")
    return out.astype(np.int64) if size is not None else int(out)


def sample_poisson(rng: np.random.Generator, mean: float, size: int | None = None):
    """Poisson draws with the given mean (>= 0)."""
    if mean < 0.0:
        raise ValueError("mean must be >= 0")
    return rng.poisson(mean, size)
