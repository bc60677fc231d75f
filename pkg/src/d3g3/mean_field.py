"""Mean-field analysis of the redistributed segment model S_S = S_C = [m, M].

With each snapshot a fresh random geometric graph, a vertex in a graph of
order ``n`` has degree ``Binomial(n - 1, p)`` with ``p = pi d^2``, survives
with probability ``P(m <= deg <= M)`` and, since S_S = S_C, every survivor
also spawns. The expected next order is therefore

    f(n) = 2 n P(m <= Binomial(n - 1, p) <= M),

and everything below (argmax, fixed points, sustainable interval, collapse
bound) is integer search on that curve.

Binomial windows are summed in log space: ``log t[0] = N log(1 - p)`` and
the ratio recurrence ``t[k+1] = t[k] * (N - k) / (k + 1) * p / (1 - p)``
give every term, then ``logsumexp`` adds the window. This stays finite and
accurate for orders in the millions. The closed-form variation uses
``gammaln`` instead, so the two routes are independent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .degree_sets import DegreeSet
from .torus import ANALYTIC_MAX_THRESHOLD, connection_probability

DEFAULT_SEARCH_CAP = 10 ** 6
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class SegmentParams:
    m: int
    M: int
    d: float

    def __post_init__(self):
        if not (0 <= self.m <= self.M):
            raise ValueError(f"need 0 <= m <= M, got m={self.m}, M={self.M}")
        connection_probability(self.d)

    @property
    def p(self) -> float:
        return connection_probability(self.d)

    @property
    def degree_set(self) -> DegreeSet:
        return DegreeSet.segment(self.m, self.M)

    @classmethod
    def from_degree_set(cls, s: DegreeSet, d: float) -> "SegmentParams":
        if not s.is_segment:
            raise ValueError(f"{s} is not a segment [m, M]")
        lo, hi = s.intervals[0]
        return cls(lo, hi, d)


# ----------------------------------------------------------- binomial windows

def _log_window(trials: np.ndarray, lo: int, hi: int, p: float) -> np.ndarray:
    """log P(lo <= Binomial(trials, p) <= hi), elementwise over ``trials``."""
    trials = np.asarray(trials, dtype=np.float64)
    out = np.full(trials.shape, -np.inf)
    live = trials >= lo
    if not live.any():
        return out
    N = trials[live][:, None]
    # start the recurrence at k = 0: gammaln(N) for N ~ 1e6 would cost ~1e-9
    # relative precision, while the summed small log ratios stay near 1e-14
    ks = np.arange(0, hi, dtype=np.float64)[None, :]
    log_q = math.log1p(-p)
    first = N * log_q
    with np.errstate(divide="ignore"):
        step = np.log(np.maximum(N - ks, 0.0)) - np.log(ks + 1.0) + (math.log(p) - log_q)
    logs = np.concatenate((first, first + np.cumsum(step, axis=1)), axis=1)[:, lo:]
    out[live] = logsumexp(logs, axis=1)
    return out


def _chunked(fn, n: np.ndarray, width: int) -> np.ndarray:
    rows = max(1, _CHUNK_CELLS // max(width, 1))
    if n.size <= rows:
        return fn(n)
    return np.concatenate([fn(n[i:i + rows]) for i in range(0, n.size, rows)])


def _survival(params: SegmentParams, n: np.ndarray) -> np.ndarray:
    width = params.M - params.m + 1
    return _chunked(lambda c: np.exp(_log_window(c - 1, params.m, params.M, params.p)), n, width)


def survival_probability(params: SegmentParams, n):
    """P(S, d, n): probability that one vertex of an order-``n`` RGG is conserved."""
    arr = np.asarray(n)
    if np.any(arr < 1):
        raise ValueError("survival probability needs n >= 1")
    out = _survival(params, arr.astype(np.float64).ravel()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def relationship(params: SegmentParams, n):
    """f(n) = 2 n P(S, d, n), with f(0) = 0."""
    arr = np.asarray(n)
    if np.any(arr < 0):
        raise ValueError("order must be non-negative")
    flat = arr.astype(np.float64).ravel()
    out = np.zeros_like(flat)
    pos = flat > 0
    if pos.any():
        out[pos] = 2.0 * flat[pos] * _survival(params, flat[pos])
    out = out.reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def relationship_delta(params: SegmentParams, n) -> float:
    """Closed-form variation f(n+1) - f(n):

    2 * sum_k (k+1) C(n, k) p^k (1-p)^(n-1-k) (1 - (n+1) p / (k+1)).
    """
    n = int(n)
    if n < 0:
        raise ValueError("order must be non-negative")
    p = params.p
    top = min(params.M, n)
    if top < params.m:
        return 0.0
    k = np.arange(params.m, top + 1, dtype=np.float64)
    logs = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
            + k * math.log(p) + (n - 1 - k) * math.log1p(-p))
    weight = (k + 1.0) - (n + 1.0) * p
    shift = logs.max()
    return float(2.0 * math.exp(shift) * math.fsum(np.exp(logs - shift) * weight))


def monotonic_bounds(params: SegmentParams) -> tuple[float, float]:
    """``(x_m, x_M)``: f rises on integers below x_m and falls above x_M."""
    p = params.p
    return (params.m + 1) / p - 1.0, (params.M + 1) / p - 1.0


def _falling_start(params: SegmentParams) -> int:
    # first integer strictly beyond x_M; f(n+1) < f(n) from here on
    return math.floor(monotonic_bounds(params)[1]) + 1


def argmax_relationship(params: SegmentParams) -> int:
    """Integer N_* maximising f; ties go to the smaller n."""
    x_m, x_M = monotonic_bounds(params)
    lo = max(0, math.ceil(x_m) - 1)
    n = np.arange(lo, math.floor(x_M) + 2)
    return int(n[np.argmax(relationship(params, n))])


def _last_at_least(params: SegmentParams, start: int, level: float) -> Optional[int]:
    """Largest n >= start with f(n) >= level, given f falls beyond ``start``."""
    if relationship(params, start) < level:
        return None
    a, width = start, max(start, 1)
    b = a + width
    while relationship(params, b) >= level:
        a, width = b, width * 2
        b = a + width
    while b - a > 1:
        mid = (a + b) // 2
        if relationship(params, mid) >= level:
            a = mid
        else:
            b = mid
    return a


def collapse_bound(params: SegmentParams) -> int:
    """Smallest N with f(n) < 1 for every n > N."""
    hi = _falling_start(params)
    last = _last_at_least(params, hi, 1.0)
    if last is not None:
        return last
    f = relationship(params, np.arange(hi + 1))
    above = np.flatnonzero(f >= 1.0)
    return int(above[-1]) if above.size else 0


def default_search_cap(params: SegmentParams) -> int:
    return int(max(2 * monotonic_bounds(params)[1], collapse_bound(params) + 1, DEFAULT_SEARCH_CAP))


def _crossings(f: np.ndarray, n: np.ndarray) -> np.ndarray:
    g = f - n
    a, b = g[:-1], g[1:]
    hit = ((a <= 0) & (b > 0)) | ((a >= 0) & (b < 0))
    return n[:-1][hit]


def fixed_points(params: SegmentParams, search_cap: Optional[int] = None) -> list[int]:
    """Integers n in [0, search_cap) where f crosses the identity:
    f(n) <= n < n+1 < f(n+1), or f(n) >= n and f(n+1) < n+1.

    Below the falling branch every integer is scanned; on the falling branch
    f(n) - n is strictly decreasing, so at most one crossing remains and a
    bisection finds it.
    """
    cap = default_search_cap(params) if search_cap is None else int(search_cap)
    hi = _falling_start(params)
    top = min(hi + 1, cap)
    n = np.arange(top + 1)
    found = [int(x) for x in _crossings(relationship(params, n), n)]
    if cap > hi + 1 and relationship(params, hi + 1) >= hi + 1:
        a, b = hi + 1, cap
        if relationship(params, b) >= b:
            return found
        while b - a > 1:
            mid = (a + b) // 2
            if relationship(params, mid) >= mid:
                a = mid
            else:
                b = mid
        found.append(a)
    return found


class RegimeKind(enum.Enum):
    ONE_FP = "one_fp"
    TWO_FP = "two_fp"
    THREE_FP = "three_fp"


class ConjectureViolation(RuntimeError):
    """More than three fixed points were found."""


def classify_fixed_points(fps: list[int]) -> RegimeKind:
    try:
        return {1: RegimeKind.ONE_FP, 2: RegimeKind.TWO_FP, 3: RegimeKind.THREE_FP}[len(fps)]
    except KeyError:
        raise ConjectureViolation(f"{len(fps)} fixed points found: {fps}") from None


@dataclass(frozen=True)
class SustainableInterval:
    lower: int
    upper: int
    # True when max f <= upper, i.e. f maps [lower, upper] into itself
    stable: bool


def sustainable_interval(params: SegmentParams, fps: Optional[list[int]] = None) -> Optional[SustainableInterval]:
    """``[N_m, N'_m]`` or None when f(N_*) <= N_*.

    ``N_m`` is the first positive fixed point; ``N'_m`` the smallest integer
    above it with f(N'_m) >= N_m > f(N'_m + 1).
    """
    n_star = argmax_relationship(params)
    f_max = relationship(params, n_star)
    if f_max <= n_star:
        return None
    fps = fixed_points(params) if fps is None else fps
    lower = next(x for x in fps if x > 0)
    hi = _falling_start(params)
    upper = None
    if lower + 1 <= hi:
        n = np.arange(lower + 1, hi + 2)
        f = relationship(params, n)
        hit = np.flatnonzero((f[:-1] >= lower) & (f[1:] < lower))
        if hit.size:
            upper = int(n[hit[0]])
    if upper is None:
        upper = _last_at_least(params, max(lower + 1, hi + 1), lower)
    if upper is None:
        upper = lower
    return SustainableInterval(lower, upper, bool(f_max <= upper))


@dataclass(frozen=True)
class RelationshipProfile:
    params: SegmentParams
    n_star: int
    f_max: float
    fixed_points: list
    regime: Optional[RegimeKind]
    interval: Optional[SustainableInterval]
    collapse_bound: int
    search_cap: int
    # empirical checks of unproven statements, never used for control flow
    conjectures: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        iv = self.interval
        return {
            "m": self.params.m,
            "M": self.params.M,
            "d": self.params.d,
            "p": self.params.p,
            "x_m": monotonic_bounds(self.params)[0],
            "x_M": monotonic_bounds(self.params)[1],
            "n_star": self.n_star,
            "f_max": self.f_max,
            "fixed_points": list(self.fixed_points),
            "regime": self.regime.value if self.regime else None,
            "sustainable_interval": None if iv is None else [iv.lower, iv.upper],
            "interval_stable": None if iv is None else iv.stable,
            "collapse_bound": self.collapse_bound,
            "search_cap": self.search_cap,
            "conjectures": dict(self.conjectures),
        }


def relationship_profile(params: SegmentParams, search_cap: Optional[int] = None) -> RelationshipProfile:
    cap = default_search_cap(params) if search_cap is None else int(search_cap)
    fps = fixed_points(params, cap)
    try:
        regime = classify_fixed_points(fps)
        at_most_three = True
    except ConjectureViolation:
        regime, at_most_three = None, False
    n_star = argmax_relationship(params)
    return RelationshipProfile(
        params=params,
        n_star=n_star,
        f_max=relationship(params, n_star),
        fixed_points=fps,
        regime=regime,
        interval=sustainable_interval(params, fps),
        collapse_bound=collapse_bound(params),
        search_cap=cap,
        conjectures={
            "conjecture:at_most_three_fixed_points": at_most_three,
            "conjecture:two_fixed_points_iff_m_is_0": (regime is RegimeKind.TWO_FP) == (params.m == 0),
        },
    )


# ------------------------------------------------------------------ S = {0}

class IsolatedLimit(NamedTuple):
    conserved: float
    order: float


def isolated_limit(d: float) -> IsolatedLimit:
    """Equilibrium mean number of conserved vertices for S = {0}.

    Non-zero root of l = l q^l + l q^(2l-1), q = 1 - p:
    l = 1 - log((sqrt(1 + 4a) - 1) / 2) / log(a), a = 1/q.
    """
    p = connection_probability(d)
    if p >= 1.0:
        raise ValueError("closed form needs p < 1")
    alpha = 1.0 / (1.0 - p)
    log_alpha = -math.log1p(-p)
    ell = 1.0 - math.log((math.sqrt(1.0 + 4.0 * alpha) - 1.0) / 2.0) / log_alpha
    return IsolatedLimit(ell, 2.0 * ell)


def isolated_order_bound(d: float) -> float:
    """Packing bound 8 / (pi d^2) on the order for S = {0}, t > 0."""
    d = float(d)
    if not (0.0 < d < ANALYTIC_MAX_THRESHOLD):
        raise ValueError(f"bound holds for 0 < d < 1/2, got {d}")
    return 8.0 / (math.pi * d * d)


def growth_probability(ss: DegreeSet, sc: DegreeSet, d: float, n: int) -> float:
    """P(n_{t+1} > n_t) for an order-``n`` RGG: 1 - (1 - P(deg in D))^n, D = ss & sc."""
    if n < 1:
        raise ValueError("order must be >= 1")
    dup = ss & sc
    if dup.is_empty:
        return 0.0
    if not dup.is_finite:
        raise ValueError("growth probability needs a finite duplication set S_S & S_C")
    p = connection_probability(d)
    logs = [_log_window(np.array([n - 1.0]), lo, hi, p)[0] for lo, hi in dup.intervals]
    x = float(np.exp(logsumexp(logs)))
    if x >= 1.0:
        return 1.0
    return float(-math.expm1(n * math.log1p(-x)))
