"""Probe-particle evolution through a quantum-Zeno IFM setup.

The probe is a three-state system: a reference state, a sample state coupled
to it by a beam splitter, and an irreversible loss channel fed by sample
encounters. One round trip = one coupling step (dt = T/N) followed by one
sample encounter; after N round trips (time T) the state is measured.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

# Empirical fit constant: the loss-peak transparency sits near 1 - 4.4/N for
# N >> 1, and the optimal round-trip count for discriminating two
# transparencies is ~4.4/sqrt((1-a1)(1-a2)).
LOSS_PEAK_CONST = 4.4

_NORM_TOL = 1e-9


class SearchBoundWarning(UserWarning):
    """An optimizer returned a value on its search boundary."""


class ValidityWarning(UserWarning):
    """An approximation was evaluated outside its documented validity range."""


@dataclass(frozen=True)
class ProbeState:
    """Complex amplitudes of the reference/sample states plus accumulated loss.

    The loss channel is irreversible, so only its probability is tracked
    (no phase). |r|^2 + |s|^2 + p_loss stays 1 under every operation here.
    """

    r: complex
    s: complex
    p_loss: float = 0.0

    @classmethod
    def initial(cls) -> "ProbeState":
        """Fresh probe: fully in the reference state."""
        return cls(1.0 + 0.0j, 0.0 + 0.0j, 0.0)

    @property
    def norm(self) -> float:
        return abs(self.r) ** 2 + abs(self.s) ** 2 + self.p_loss

    @property
    def probabilities(self) -> tuple[float, float, float]:
        """(p_r, p_s, p_loss) for a measurement of this state."""
        return abs(self.r) ** 2, abs(self.s) ** 2, self.p_loss


@dataclass(frozen=True)
class SampleSpec:
    """Sample seen once per round trip: transparency, phase shift, and an
    optional compensation phase applied against it."""

    alpha: float
    phi: float = 0.0
    phi_comp: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"transparency must be in [0, 1], got {self.alpha}")
        if not (math.isfinite(self.phi) and math.isfinite(self.phi_comp)):
            raise ValueError("phases must be finite")

    @property
    def net_phase(self) -> float:
        return self.phi - self.phi_comp


@dataclass(frozen=True)
class SetupSpec:
    n_roundtrips: int
    record_trace: bool = False

    def __post_init__(self) -> None:
        if int(self.n_roundtrips) != self.n_roundtrips or self.n_roundtrips < 1:
            raise ValueError(f"n_roundtrips must be a positive integer, got {self.n_roundtrips}")


@dataclass(frozen=True)
class OutcomeProbabilities:
    """Measurement probabilities at time T, optionally with the per-round-trip
    trace [(step, p_r, p_s, p_l), ...] including the initial state at step 0."""

    p_r: float
    p_s: float
    p_l: float
    trace: tuple[tuple[int, float, float, float], ...] | None = None

    def as_tuple(self) -> tuple[float, float, float]:
        return self.p_r, self.p_s, self.p_l


def coupling_matrix(dt_fraction: float) -> np.ndarray:
    """Propagator for a coherent coupling over dt = dt_fraction * T.

    With dt_fraction = 1/N the matrix is the per-round-trip beam splitter;
    N applications complete the half oscillation reference -> sample.
    """
    e = cmath.exp(-1j * math.pi * dt_fraction)
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    return np.array([[a, b], [b, a]], dtype=complex)


def coherent_step(state: ProbeState, n: int) -> ProbeState:
    """Apply one coupling step of duration T/n to the probe amplitudes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    e = cmath.exp(-1j * math.pi / n)
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    return ProbeState(a * state.r + b * state.s, b * state.r + a * state.s, state.p_loss)


def sample_encounter(state: ProbeState, sample: SampleSpec) -> ProbeState:
    """One pass of the sample-state amplitude through the sample.

    The transmitted amplitude keeps sqrt(alpha) of itself and picks up the
    (net) phase; the absorbed/scattered part moves irreversibly into the
    loss probability.
    """
    s2 = state.s.real * state.s.real + state.s.imag * state.s.imag
    new_s = cmath.exp(1j * sample.net_phase) * math.sqrt(sample.alpha) * state.s
    return ProbeState(state.r, new_s, state.p_loss + (1.0 - sample.alpha) * s2)


def _evolve_scalar(n: int, alpha: float, net_phase: float = 0.0) -> tuple[float, float, float]:
    """Fast inline evolution; returns (p_r, p_s, p_l) at time T."""
    e = cmath.exp(-1j * math.pi / n)
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    ph = cmath.exp(1j * net_phase) * math.sqrt(alpha)
    r = 1.0 + 0.0j
    s = 0.0 + 0.0j
    pl = 0.0
    one_minus = 1.0 - alpha
    for _ in range(n):
        r, s = a * r + b * s, b * r + a * s
        pl += one_minus * (s.real * s.real + s.imag * s.imag)
        s *= ph
    return abs(r) ** 2, abs(s) ** 2, pl


def _evolve_grid(n: int, alphas: np.ndarray, net_phase: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized evolution over a transparency grid at fixed n."""
    alphas = np.asarray(alphas, dtype=float)
    e = cmath.exp(-1j * math.pi / n)
    a = 0.5 * (1.0 + e)
    b = 0.5 * (1.0 - e)
    ph = cmath.exp(1j * net_phase) * np.sqrt(alphas)
    one_minus = 1.0 - alphas
    r = np.ones(alphas.shape, dtype=complex)
    s = np.zeros(alphas.shape, dtype=complex)
    pl = np.zeros(alphas.shape, dtype=float)
    for _ in range(n):
        r, s = a * r + b * s, b * r + a * s
        pl += one_minus * (s.real * s.real + s.imag * s.imag)
        s = s * ph
    return np.abs(r) ** 2, np.abs(s) ** 2, pl


def run_ifm(setup: SetupSpec, sample: SampleSpec) -> OutcomeProbabilities:
    """Full measurement cycle: N round trips from the initial reference state.

    Equivalent to alternating coherent_step and sample_encounter N times;
    the trace (if requested) records probabilities after each round trip.
    """
    n = setup.n_roundtrips
    if not setup.record_trace:
        p_r, p_s, p_l = _evolve_scalar(n, sample.alpha, sample.net_phase)
        return OutcomeProbabilities(p_r, p_s, p_l)

    state = ProbeState.initial()
    trace = [(0, 1.0, 0.0, 0.0)]
    for k in range(1, n + 1):
        state = sample_encounter(coherent_step(state, n), sample)
        p_r, p_s, p_l = state.probabilities
        trace.append((k, p_r, p_s, p_l))
    return OutcomeProbabilities(p_r, p_s, p_l, trace=tuple(trace))


def opaque_loss_closed_form(n: int) -> float:
    """Loss probability for a fully opaque sample: 1 - cos^(2N)(pi/2N)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1.0 - math.cos(math.pi / (2 * n)) ** (2 * n)


def probability_sweep(
    n: int,
    alphas: "np.ndarray | list[float]",
    phi: float = 0.0,
    phi_comp: float = 0.0,
) -> list[OutcomeProbabilities]:
    """Measurement probabilities across a transparency grid (one run per point).

    Rows come back in input order.
    """
    alphas = np.asarray(alphas, dtype=float)
    if alphas.size == 0:
        raise ValueError("empty transparency grid")
    if np.any((alphas < 0.0) | (alphas > 1.0)):
        raise ValueError("transparencies must lie in [0, 1]")
    p_r, p_s, p_l = _evolve_grid(n, alphas, phi - phi_comp)
    return [OutcomeProbabilities(float(a), float(b), float(c)) for a, b, c in zip(p_r, p_s, p_l)]


def loss_peak(n: int, grid_points: int = 10_000, alpha_resolution: float = 1e-7) -> tuple[float, float]:
    """Location and height of the loss-probability maximum over alpha in (0, 1).

    Dense grid in log(1-alpha) first (the peak is smooth and unimodal on that
    scale), then golden-section refinement of the bracketing interval down to
    alpha_resolution. Returns (alpha_peak, p_l_max).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    lo = max(1e-12, 0.01 * LOSS_PEAK_CONST / n)
    u = np.linspace(math.log(lo), 0.0, grid_points)  # u = log(1 - alpha)
    alphas = 1.0 - np.exp(u)
    _, _, pl = _evolve_grid(n, alphas)
    i = int(np.argmax(pl))
    i_lo, i_hi = max(i - 1, 0), min(i + 1, grid_points - 1)

    def f(uu: float) -> float:
        return _evolve_scalar(n, 1.0 - math.exp(uu))[2]

    # golden-section maximization on u within the bracketing grid cells
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a_u, b_u = float(u[i_lo]), float(u[i_hi])
    c_u = b_u - inv_phi * (b_u - a_u)
    d_u = a_u + inv_phi * (b_u - a_u)
    f_c, f_d = f(c_u), f(d_u)
    while (math.exp(b_u) - math.exp(a_u)) > alpha_resolution:
        if f_c > f_d:
            b_u, d_u, f_d = d_u, c_u, f_c
            c_u = b_u - inv_phi * (b_u - a_u)
            f_c = f(c_u)
        else:
            a_u, c_u, f_c = c_u, d_u, f_d
            d_u = a_u + inv_phi * (b_u - a_u)
            f_d = f(d_u)
    u_best = 0.5 * (a_u + b_u)
    alpha_best = 1.0 - math.exp(u_best)
    return alpha_best, _evolve_scalar(n, alpha_best)[2]


def alpha_prime_approx(n: int) -> float:
    """Approximate loss-peak transparency 1 - 4.4/n (valid for n >> 1)."""
    if n < 5:
        warnings.warn(
            f"alpha_prime_approx is outside its validity range for n={n} (< 5)",
            ValidityWarning,
            stacklevel=2,
        )
    return 1.0 - LOSS_PEAK_CONST / n


def n_opt_approx(alpha1: float, alpha2: float) -> float:
    """Approximate loss-minimizing round-trip count, 4.4/sqrt((1-a1)(1-a2))."""
    if not (0.0 <= alpha1 < 1.0 and 0.0 <= alpha2 < 1.0):
        raise ValueError("transparencies must lie in [0, 1); alpha = 1 has no finite optimum")
    return LOSS_PEAK_CONST / math.sqrt((1.0 - alpha1) * (1.0 - alpha2))


def _avg_loss(n: int, alpha1: float, alpha2: float) -> float:
    return 0.5 * (_evolve_scalar(n, alpha1)[2] + _evolve_scalar(n, alpha2)[2])


def _scan_min(f, lo: int, hi: int) -> tuple[int, float]:
    """Exhaustive integer argmin of f on [lo, hi]; ties go to the smaller N."""
    best_n, best_v = lo, f(lo)
    for n in range(lo + 1, hi + 1):
        v = f(n)
        if v < best_v:
            best_n, best_v = n, v
    return best_n, best_v


def _coarse_refine_min(f, lo: int, hi: int, coarse: int = 48) -> tuple[int, float]:
    """Argmin of a smooth f over a large integer range: geometric coarse scan,
    then golden-section (in log N) between the bracketing grid neighbours."""
    grid = sorted({int(round(x)) for x in np.geomspace(lo, hi, coarse)})
    vals = [f(n) for n in grid]
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    if b - a <= 64:
        return _scan_min(f, a, b)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    cache: dict[int, float] = {grid[j]: vals[j] for j in range(len(grid))}

    def g(n: int) -> float:
        if n not in cache:
            cache[n] = f(n)
        return cache[n]

    la, lb = math.log(a), math.log(b)
    lc = lb - inv_phi * (lb - la)
    ld = la + inv_phi * (lb - la)
    while int(round(math.exp(lb))) - int(round(math.exp(la))) > 16:
        if g(int(round(math.exp(lc)))) < g(int(round(math.exp(ld)))):
            lb, ld = ld, lc
            lc = lb - inv_phi * (lb - la)
        else:
            la, lc = lc, ld
            ld = la + inv_phi * (lb - la)
    return _scan_min(g, int(round(math.exp(la))), int(round(math.exp(lb))))


def n_opt_numeric(alpha1: float, alpha2: float, n_max: int | None = None) -> int:
    """Integer N in [1, n_max] minimizing the mean loss over both transparencies.

    n_max defaults to ceil(10 * n_opt_approx). A SearchBoundWarning is issued
    when the minimum lands on n_max (no interior minimum inside the bound,
    e.g. for alpha1 = alpha2 = 0 where the loss decreases monotonically).
    """
    if not (0.0 <= alpha1 < 1.0 and 0.0 <= alpha2 < 1.0):
        raise ValueError("transparencies must lie in [0, 1)")
    if n_max is None:
        n_max = math.ceil(10.0 * n_opt_approx(alpha1, alpha2))
    if n_max < 1:
        raise ValueError("n_max must be >= 1")

    f = lambda n: _avg_loss(n, alpha1, alpha2)
    if n_max <= 3000:
        best_n, _ = _scan_min(f, 1, n_max)
    else:
        best_n, best_v = _coarse_refine_min(f, 1, n_max)
        # the coarse path can miss the trivial small-N region; check it cheaply
        small_n, small_v = _scan_min(f, 1, min(64, n_max))
        if small_v < best_v:
            best_n = small_n
    if best_n == n_max:
        warnings.warn(
            f"minimum of the average loss sits on the search bound n_max={n_max}",
            SearchBoundWarning,
            stacklevel=2,
        )
    return best_n


@dataclass(frozen=True)
class ContrastPoint:
    contrast: float
    alpha1: float
    alpha2: float
    n_opt: int
    avg_loss: float
    at_search_bound: bool = False


def contrast_curve(
    contrasts: "np.ndarray | list[float]",
    alpha2_anchor: float = 1.0 - 1e-4,
    n_max: int | None = None,
) -> list[ContrastPoint]:
    """Minimum average loss for discriminating (a1, a2) as a function of the
    contrast (1-a1)/(1-a2), with a2 anchored near 1.

    N is chosen inside the discriminating window where the loss peak lies
    between the two transparencies (roughly 4.4/(1-a1) .. 4.4/(1-a2)); outside
    that window the probe either passes both samples untouched or is frozen by
    the Zeno effect for both, and no measurement happens. At contrast 1 the
    window collapses onto the single loss peak.
    """
    if not 0.0 < alpha2_anchor < 1.0:
        raise ValueError("alpha2_anchor must lie in (0, 1)")
    out = []
    for c in contrasts:
        c = float(c)
        if c < 1.0:
            raise ValueError(f"contrast must be >= 1, got {c}")
        alpha1 = 1.0 - c * (1.0 - alpha2_anchor)
        if alpha1 < -1e-9:
            raise ValueError(f"contrast {c} too large for anchor {alpha2_anchor} (alpha1 < 0)")
        alpha1 = max(alpha1, 0.0)
        n_lo = max(1, int(math.ceil(LOSS_PEAK_CONST / (1.0 - alpha1))))
        n_hi = max(n_lo, int(math.floor(LOSS_PEAK_CONST / (1.0 - alpha2_anchor))))
        if n_max is not None:
            n_hi = min(n_hi, n_max)
            n_lo = min(n_lo, n_hi)
        f = lambda n: _avg_loss(n, alpha1, alpha2_anchor)
        if n_hi - n_lo <= 400:
            best_n, best_v = _scan_min(f, n_lo, n_hi)
        else:
            best_n, best_v = _coarse_refine_min(f, n_lo, n_hi)
        out.append(
            ContrastPoint(
                contrast=c,
                alpha1=alpha1,
                alpha2=alpha2_anchor,
                n_opt=best_n,
                avg_loss=best_v,
                at_search_bound=best_n in (n_lo, n_hi) and n_hi > n_lo,
            )
        )
    return out
