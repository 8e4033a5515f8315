"""Sequential Bayesian discrimination of two candidate transparencies.

Each measurement repeats single-particle runs (classical transmission or a
full IFM cycle), updating the posterior after every run, and stops once one
hypothesis drops below the threshold x. Monte Carlo over many measurements
maps out mean particle loss versus error probability, to compare against the
general quantum lower bound on lost particles.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .evolution import _evolve_scalar
from .stats import make_stream

_BLOCK0 = 64
_BLOCK_MAX = 4096
DEFAULT_CAP = 10**6

# classical runs have two outcomes (transmitted, lost); ifm runs three (R, S, L)
_LOST_FLAGS = {
    "classical": np.array([0, 1], dtype=np.int64),
    "ifm": np.array([0, 0, 1], dtype=np.int64),
}


@dataclass(frozen=True)
class StrategySpec:
    """Which measurement to run and on which transparency pair (alpha1 < alpha2)."""

    kind: str
    alpha1: float
    alpha2: float
    n_roundtrips: int | None = None
    phi: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("classical", "ifm"):
            raise ValueError(f"kind must be 'classical' or 'ifm', got {self.kind!r}")
        if not 0.0 <= self.alpha1 < self.alpha2 <= 1.0:
            raise ValueError(
                f"need 0 <= alpha1 < alpha2 <= 1, got ({self.alpha1}, {self.alpha2})"
            )
        if self.kind == "ifm" and (self.n_roundtrips is None or self.n_roundtrips < 1):
            raise ValueError("ifm strategy needs n_roundtrips >= 1")

    def outcome_probabilities(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-run outcome distributions under each hypothesis."""
        if self.kind == "classical":
            p1 = np.array([self.alpha1, 1.0 - self.alpha1])
            p2 = np.array([self.alpha2, 1.0 - self.alpha2])
        else:
            p1 = np.array(_evolve_scalar(self.n_roundtrips, self.alpha1, self.phi))
            p2 = np.array(_evolve_scalar(self.n_roundtrips, self.alpha2, self.phi))
            p1 = np.clip(p1, 0.0, None)
            p2 = np.clip(p2, 0.0, None)
            p1, p2 = p1 / p1.sum(), p2 / p2.sum()
        return p1, p2


@dataclass(frozen=True)
class SequentialRun:
    """One stopped measurement: the decided transparency and its particle bill."""

    decision: float
    particles_used: int
    particles_lost: int
    counts: tuple[int, ...]
    capped: bool = False


@dataclass(frozen=True)
class DiscriminationPoint:
    threshold_x: float
    error_probability: float
    mean_lost: float
    mean_used: float
    replications: int
    capped_runs: int = 0
    mean_lost_se: float = 0.0


def _loglik(counts, probs) -> float:
    """Sum of count * log(prob) with the 0 * log(0) = 0 convention."""
    ll = 0.0
    for c, p in zip(counts, probs):
        if c == 0:
            continue
        if p <= 0.0:
            return -math.inf
        ll += c * math.log(p)
    return ll


def _posterior_from_logliks(ll1: float, ll2: float) -> float:
    if ll1 == -math.inf and ll2 == -math.inf:
        raise ValueError("observed counts are impossible under both hypotheses")
    if ll1 == -math.inf:
        return 0.0
    if ll2 == -math.inf:
        return 1.0
    d = ll2 - ll1
    if d > 700.0:
        return 0.0
    if d < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(d))


def posterior_classical(n_pass: int, n_total: int, alpha1: float, alpha2: float) -> float:
    """P(alpha = alpha1 | n_pass transmitted of n_total), equal priors."""
    if not 0 <= n_pass <= n_total:
        raise ValueError("need 0 <= n_pass <= n_total")
    n_lost = n_total - n_pass
    ll1 = _loglik((n_pass, n_lost), (alpha1, 1.0 - alpha1))
    ll2 = _loglik((n_pass, n_lost), (alpha2, 1.0 - alpha2))
    return _posterior_from_logliks(ll1, ll2)


def posterior_ifm(n_r: int, n_s: int, n_l: int, probs1, probs2) -> float:
    """P(alpha = alpha1 | IFM counts), equal priors.

    probs1/probs2 are the per-run outcome probabilities under each hypothesis
    (OutcomeProbabilities or plain (p_r, p_s, p_l) triples). A zero-probability
    outcome with a nonzero count forces the posterior to 0 or 1.
    """
    if min(n_r, n_s, n_l) < 0:
        raise ValueError("counts must be non-negative")
    t1 = probs1.as_tuple() if hasattr(probs1, "as_tuple") else tuple(probs1)
    t2 = probs2.as_tuple() if hasattr(probs2, "as_tuple") else tuple(probs2)
    counts = (n_r, n_s, n_l)
    return _posterior_from_logliks(_loglik(counts, t1), _loglik(counts, t2))


def min_loss_bound(alpha1: float, alpha2: float, p_e: float) -> float:
    """Minimum mean number of lost particles for any quantum strategy that
    distinguishes alpha1 from alpha2 (equal priors) with error at most p_e.

    Returns 0 when either transparency is exactly 1 and diverges (inf) as
    alpha1 -> alpha2.
    """
    if not (0.0 <= alpha1 <= 1.0 and 0.0 <= alpha2 <= 1.0):
        raise ValueError("transparencies must lie in [0, 1]")
    if not 0.0 <= p_e <= 0.5:
        raise ValueError("p_e must lie in [0, 0.5]")
    cross = math.sqrt(1.0 - alpha1) * math.sqrt(1.0 - alpha2)
    if cross == 0.0:
        return 0.0
    denom = 1.0 - math.sqrt(alpha1 * alpha2) - cross
    if denom <= 0.0:
        return math.inf
    return cross * (1.0 - 2.0 * math.sqrt(p_e * (1.0 - p_e))) / denom


def _sequential_pass(
    rng: np.random.Generator,
    cum_true: np.ndarray,
    llr: np.ndarray,
    lost_flag: np.ndarray,
    levels_sorted: np.ndarray,
    cap: int,
    want_counts: bool = False,
):
    """Walk one replication's outcome sequence past every stopping level.

    Returns per sorted level: runs used, particles lost, True where the walk
    favoured hypothesis 1, capped flags, and (optionally) per-outcome counts.
    """
    n_lev = len(levels_sorted)
    n_out = len(lost_flag)
    used_v = np.empty(n_lev, np.int64)
    lost_v = np.empty(n_lev, np.int64)
    dec1_v = np.empty(n_lev, bool)
    capped_v = np.zeros(n_lev, bool)
    counts_v = np.zeros((n_lev, n_out), np.int64) if want_counts else None

    csum = 0.0
    lost_ct = 0
    counts_ct = np.zeros(n_out, np.int64)
    used = 0
    resolved = 0
    blk = _BLOCK0
    while resolved < n_lev and used < cap:
        m = min(blk, cap - used)
        outs = np.searchsorted(cum_true, rng.random(m), side="right")
        cs = csum + np.cumsum(llr[outs])
        runmax = np.maximum.accumulate(np.abs(cs))
        idxs = np.searchsorted(runmax, levels_sorted[resolved:], side="right")
        inside = np.nonzero(idxs < m)[0]
        lcs = np.cumsum(lost_flag[outs])
        if inside.size:
            sel = idxs[inside]
            rows = resolved + inside
            used_v[rows] = used + sel + 1
            lost_v[rows] = lost_ct + lcs[sel]
            dec1_v[rows] = cs[sel] > 0.0
            if want_counts:
                for row, k in zip(rows, sel):
                    counts_v[row] = counts_ct + np.bincount(outs[: k + 1], minlength=n_out)
            resolved += inside.size
        csum = float(cs[-1])
        lost_ct += int(lcs[-1])
        if want_counts:
            counts_ct += np.bincount(outs, minlength=n_out)
        used += m
        blk = min(blk * 4, _BLOCK_MAX)
    if resolved < n_lev:
        used_v[resolved:] = used
        lost_v[resolved:] = lost_ct
        dec1_v[resolved:] = csum > 0.0
        capped_v[resolved:] = True
        if want_counts:
            counts_v[resolved:] = counts_ct
    return used_v, lost_v, dec1_v, capped_v, counts_v


def _level(threshold_x: float) -> float:
    if not 0.0 < threshold_x < 0.5:
        raise ValueError(f"threshold must lie in (0, 0.5), got {threshold_x}")
    return math.log((1.0 - threshold_x) / threshold_x)


def run_sequential(
    strategy: StrategySpec,
    true_alpha: float,
    threshold_x: float,
    stream: np.random.Generator,
    cap: int = DEFAULT_CAP,
) -> SequentialRun:
    """One sequential measurement against the true transparency.

    Stops when min(posterior, 1 - posterior) < threshold_x or after cap runs
    (flagged); the decision is the more likely hypothesis either way.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if true_alpha == strategy.alpha1:
        truth = 0
    elif true_alpha == strategy.alpha2:
        truth = 1
    else:
        raise ValueError("true_alpha must be one of the strategy's transparencies")
    p1, p2 = strategy.outcome_probabilities()
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(p1) - np.log(p2)
    cum = np.cumsum(p1 if truth == 0 else p2)
    cum[-1] = 1.0
    levels = np.array([_level(threshold_x)])
    used, lost, dec1, capped, counts = _sequential_pass(
        stream, cum, llr, _LOST_FLAGS[strategy.kind], levels, cap, want_counts=True
    )
    return SequentialRun(
        decision=strategy.alpha1 if dec1[0] else strategy.alpha2,
        particles_used=int(used[0]),
        particles_lost=int(lost[0]),
        counts=tuple(int(c) for c in counts[0]),
        capped=bool(capped[0]),
    )


def _curve_chunk(args) -> tuple[np.ndarray, ...]:
    """Aggregate one contiguous replication range (worker for the process pool)."""
    strategy, levels_sorted, seed, start, stop, cap, stratified = args
    p1, p2 = strategy.outcome_probabilities()
    with np.errstate(divide="ignore", invalid="ignore"):
        llr = np.log(p1) - np.log(p2)
    cums = []
    for p in (p1, p2):
        c = np.cumsum(p)
        c[-1] = 1.0
        cums.append(c)
    lost_flag = _LOST_FLAGS[strategy.kind]
    n_lev = len(levels_sorted)

    err = np.zeros(n_lev, np.int64)
    lost_sum = np.zeros(n_lev, np.int64)
    lost_sq = np.zeros(n_lev, np.int64)
    used_sum = np.zeros(n_lev, np.int64)
    capped_n = np.zeros(n_lev, np.int64)
    for rep in range(start, stop):
        # stream contract: one uniform decides the true hypothesis (u < 0.5 ->
        # alpha1), the rest drives the outcome draws
        rng = make_stream(seed, rep)
        truth = (rep % 2) if stratified else (0 if rng.random() < 0.5 else 1)
        used, lost, dec1, capped, _ = _sequential_pass(
            rng, cums[truth], llr, lost_flag, levels_sorted, cap
        )
        err += dec1 != (truth == 0)
        lost_sum += lost
        lost_sq += lost * lost
        used_sum += used
        capped_n += capped
    return err, lost_sum, lost_sq, used_sum, capped_n


def default_thresholds(n_points: int = 61) -> np.ndarray:
    """Log-spaced stopping thresholds from 0.49 down to 1e-12."""
    return np.geomspace(0.49, 1e-12, n_points)


def monte_carlo_curve(
    strategy: StrategySpec,
    thresholds=None,
    replications: int = 40000,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
    stratified: bool = False,
    dedupe: bool = True,
) -> list[DiscriminationPoint]:
    """Error probability and mean particle loss across a threshold grid.

    Every replication draws the true transparency (equal probability), then one
    outcome path that is evaluated against all thresholds at once, so the grid
    shares common random numbers. Results are bit-identical for a given seed at
    any thread count: replication r always uses stream (seed, r) and the
    aggregation is integer sums in fixed order. Duplicate (error, loss) points
    from adjacent thresholds are dropped unless dedupe=False.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    thresholds = default_thresholds() if thresholds is None else np.asarray(thresholds, float)
    levels = np.array([_level(x) for x in thresholds])
    order = np.argsort(levels, kind="stable")
    levels_sorted = levels[order]

    n_workers = max(1, int(threads))
    if n_workers == 1 or replications < 256:
        parts = [_curve_chunk((strategy, levels_sorted, seed, 0, replications, cap, stratified))]
    else:
        bounds = np.linspace(0, replications, 4 * n_workers + 1, dtype=int)
        jobs = [
            (strategy, levels_sorted, seed, int(a), int(b), cap, stratified)
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(_curve_chunk, jobs))

    err, lost_sum, lost_sq, used_sum, capped_n = (sum(t) for t in zip(*parts))

    points = []
    seen = set()
    for j in range(len(thresholds)):
        js = int(np.nonzero(order == j)[0][0])
        r = replications
        mean_lost = float(lost_sum[js] / r)
        var = max(float(lost_sq[js]) / r - mean_lost * mean_lost, 0.0)
        point = DiscriminationPoint(
            threshold_x=float(thresholds[j]),
            error_probability=float(err[js] / r),
            mean_lost=mean_lost,
            mean_used=float(used_sum[js] / r),
            replications=r,
            capped_runs=int(capped_n[js]),
            mean_lost_se=math.sqrt(var / r),
        )
        key = (point.error_probability, point.mean_lost)
        if dedupe and key in seen:
            continue
        seen.add(key)
        points.append(point)
    return points
