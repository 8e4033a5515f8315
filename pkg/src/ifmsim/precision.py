"""Expected particle loss when measuring an unknown transparency.

Pick a signal (reference counts, sample counts, loss counts, or a classical
transmission measurement), a target uncertainty on the transparency, and a
counting model (binomial for number states, Poisson for a source where only
the mean particle number is known): these routines invert the corresponding
confidence interval to find the trials needed, and multiply by the per-trial
loss probability.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .evolution import _evolve_scalar
from .stats import clopper_pearson, normal_quantile, poisson_interval

SIGNALS = ("reference", "sample", "loss", "classical_transmission")

M_MAX = 10**12
_FLAT_SLOPE = 1e-6
_RICHARDSON_TOL = 1e-3


class DerivativeWarning(UserWarning):
    """The finite-difference slope is flat, unstable, or one-sided."""


@dataclass(frozen=True)
class LossBudget:
    """Trials needed for the target uncertainty and the resulting expected loss.

    m_required is None (and expected_lost inf) when no finite trial count can
    reach the target, e.g. on a flat stretch of the signal curve.
    """

    alpha: float
    delta_alpha: float
    m_required: int | None
    expected_lost: float
    flags: tuple[str, ...] = ()


def _check_signal(signal: str) -> None:
    if signal not in SIGNALS:
        raise ValueError(f"signal must be one of {SIGNALS}, got {signal!r}")


def signal_probabilities(signal: str, n: int | None, alpha: float) -> tuple[float, float]:
    """(signal probability, loss probability) at the given transparency."""
    _check_signal(signal)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if signal == "classical_transmission":
        return alpha, 1.0 - alpha
    if n is None or n < 1:
        raise ValueError("IFM signals need the round-trip count n >= 1")
    p_r, p_s, p_l = _evolve_scalar(n, alpha)
    return {"reference": p_r, "sample": p_s, "loss": p_l}[signal], p_l


def _signal_value(signal: str, n: int | None, alpha: float) -> float:
    return signal_probabilities(signal, n, alpha)[0]


def _derivative_flagged(alpha: float, n: int | None, signal: str, h: float) -> tuple[float, tuple[str, ...]]:
    flags: tuple[str, ...] = ()

    def diff(step: float) -> float:
        lo, hi = alpha - step, alpha + step
        if lo < 0.0 or hi > 1.0:
            return math.nan
        return (_signal_value(signal, n, hi) - _signal_value(signal, n, lo)) / (2.0 * step)

    d = diff(h)
    if math.isnan(d):  # endpoint: fall back to a one-sided difference
        flags += ("endpoint",)
        if alpha - h < 0.0:
            d = (_signal_value(signal, n, alpha + h) - _signal_value(signal, n, alpha)) / h
        else:
            d = (_signal_value(signal, n, alpha) - _signal_value(signal, n, alpha - h)) / h
    else:
        d_check = diff(h / 10.0)
        scale = max(abs(d), abs(d_check))
        if scale < _FLAT_SLOPE:
            pass  # handled by the flat check below
        elif abs(d - d_check) > _RICHARDSON_TOL * scale:
            flags += ("derivative-unstable",)
    if abs(d) < _FLAT_SLOPE:
        flags += ("flat-signal",)
    return d, flags


def signal_derivative(alpha: float, n: int | None, signal: str, h: float = 1e-4) -> float:
    """Slope of the signal probability versus transparency.

    Exactly 1 for classical transmission; otherwise a central finite
    difference with step h, cross-checked at h/10. Flat or unstable slopes
    raise a DerivativeWarning (the uncertainty inversion diverges there).
    """
    _check_signal(signal)
    if signal == "classical_transmission":
        return 1.0
    d, flags = _derivative_flagged(alpha, n, signal, h)
    if flags:
        warnings.warn(
            f"signal derivative at alpha={alpha}, n={n}, signal={signal!r}: {', '.join(flags)}",
            DerivativeWarning,
            stacklevel=2,
        )
    return d


def _slope(alpha: float, n: int | None, signal: str) -> tuple[float, tuple[str, ...]]:
    if signal == "classical_transmission":
        return 1.0, ()
    return _derivative_flagged(alpha, n, signal, 1e-4)


def expected_loss_normal_binomial(
    alpha: float, delta_alpha: float, signal: str, n: int | None = None, coverage: float = 0.95
) -> float:
    """Normal-approximation expected loss, P_L * P(1-P) * (2z / (dAlpha P'))^2.

    Invalid where the signal probability is 0 or 1 (the approximation
    collapses there); returns inf on a flat signal.
    """
    if delta_alpha <= 0.0:
        raise ValueError("delta_alpha must be positive")
    p, p_loss = signal_probabilities(signal, n, alpha)
    if p <= 0.0 or p >= 1.0:
        raise ValueError(f"normal approximation invalid at signal probability {p}")
    deriv, _ = _slope(alpha, n, signal)
    if deriv == 0.0:
        return math.inf
    two_z = 2.0 * normal_quantile(0.5 * (1.0 + coverage))
    return p_loss * p * (1.0 - p) * (two_z / (delta_alpha * abs(deriv))) ** 2


def expected_loss_normal_poisson(
    alpha: float, delta_alpha: float, signal: str, n: int | None = None, coverage: float = 0.95
) -> float:
    """Poisson-statistics analog of the normal approximation: P(1-P) -> P.

    Applies when the particle number is only known on average and lost
    particles cannot be counted, so the loss signal is not allowed.
    """
    if delta_alpha <= 0.0:
        raise ValueError("delta_alpha must be positive")
    if signal == "loss":
        raise ValueError("loss signal unavailable under Poisson statistics (losses not measurable)")
    p, p_loss = signal_probabilities(signal, n, alpha)
    if p <= 0.0:
        raise ValueError("normal approximation invalid at zero signal probability")
    deriv, _ = _slope(alpha, n, signal)
    if deriv == 0.0:
        return math.inf
    two_z = 2.0 * normal_quantile(0.5 * (1.0 + coverage))
    return p_loss * p * (two_z / (delta_alpha * abs(deriv))) ** 2


def _min_trials(width_at, target: float) -> int | None:
    """Smallest m with width_at(m) <= target; None if not reached by M_MAX.

    The width is only approximately monotone in m (the expected count gets
    rounded), so the bisection result is verified downward.
    """
    hi = 1
    while width_at(hi) > target:
        hi *= 2
        if hi > M_MAX:
            return None
    lo = max(hi // 2, 1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if width_at(mid) <= target:
            hi = mid
        else:
            lo = mid
    m = hi
    while m > 1 and width_at(m - 1) <= target:
        m -= 1
    return m


def _counts_at(p: float, m: int, worst_case: bool) -> tuple[int, ...]:
    if worst_case:
        k_lo = max(0, min(m, math.floor(p * m)))
        k_hi = max(0, min(m, math.ceil(p * m)))
        return (k_lo, k_hi) if k_hi != k_lo else (k_lo,)
    return (max(0, min(m, round(p * m))),)


def expected_loss_clopper_pearson(
    alpha: float,
    delta_alpha: float,
    signal: str,
    n: int | None = None,
    coverage: float = 0.95,
    worst_case_count: bool = False,
) -> LossBudget:
    """Invert the Clopper-Pearson interval to find the trials needed for the
    target transparency uncertainty, then convert to expected lost particles.

    The interval is evaluated at the expected count round(P*m)
    (worst_case_count widens it over the floor/ceil pair).
    """
    if delta_alpha <= 0.0:
        raise ValueError("delta_alpha must be positive")
    p, p_loss = signal_probabilities(signal, n, alpha)
    deriv, flags = _slope(alpha, n, signal)
    dp = abs(deriv) * delta_alpha
    if dp <= 0.0:
        return LossBudget(alpha, delta_alpha, None, math.inf, flags + ("unbounded",))

    def width_at(m: int) -> float:
        return max(clopper_pearson(k, m, coverage).width for k in _counts_at(p, m, worst_case_count))

    m = _min_trials(width_at, dp)
    if m is None:
        return LossBudget(alpha, delta_alpha, None, math.inf, flags + ("unbounded",))
    return LossBudget(alpha, delta_alpha, m, m * p_loss, flags)


def expected_loss_poisson_chi2(
    alpha: float,
    delta_alpha: float,
    signal: str,
    n: int | None = None,
    coverage: float = 0.95,
    worst_case_count: bool = False,
) -> LossBudget:
    """Same inversion with chi-squared Poisson intervals on the mean count,
    rescaled by the mean trial number, for sources with Poissonian statistics
    where lost particles cannot be counted."""
    if delta_alpha <= 0.0:
        raise ValueError("delta_alpha must be positive")
    if signal == "loss":
        raise ValueError("loss signal unavailable under Poisson statistics (losses not measurable)")
    p, p_loss = signal_probabilities(signal, n, alpha)
    deriv, flags = _slope(alpha, n, signal)
    dp = abs(deriv) * delta_alpha
    if dp <= 0.0:
        return LossBudget(alpha, delta_alpha, None, math.inf, flags + ("unbounded",))

    def width_at(m: int) -> float:
        return max(poisson_interval(k, coverage).width for k in _counts_at(p, m, worst_case_count)) / m

    m = _min_trials(width_at, dp)
    if m is None:
        return LossBudget(alpha, delta_alpha, None, math.inf, flags + ("unbounded",))
    return LossBudget(alpha, delta_alpha, m, m * p_loss, flags)


def loss_curve(
    signal: str,
    n: int | None,
    delta_alpha: float,
    alpha_grid,
    statistics: str = "binomial",
    coverage: float = 0.95,
) -> list[LossBudget]:
    """LossBudget rows over a transparency grid (CSV-ready; unbounded points
    come back flagged rather than raising)."""
    if statistics not in ("binomial", "poisson"):
        raise ValueError(f"statistics must be 'binomial' or 'poisson', got {statistics!r}")
    fn = expected_loss_clopper_pearson if statistics == "binomial" else expected_loss_poisson_chi2
    return [fn(float(a), delta_alpha, signal, n, coverage) for a in np.asarray(alpha_grid, float)]
