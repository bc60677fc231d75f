"""Degree sets S_S / S_C and the parameter-regime taxonomy.

A :class:`DegreeSet` is stored canonically as a sorted tuple of disjoint,
non-adjacent closed integer intervals; the last upper bound may be
``math.inf``. That covers the four shapes the generator is usually driven
with (empty, all naturals, finite, segment) plus co-finite sets such as
``[3, inf]``, and makes intersection, union and complement exact.
"""

from __future__ import annotations

import bisect
import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

INF = math.inf


def _normalise(intervals) -> tuple:
    spans = sorted((int(lo), hi if hi == INF else int(hi)) for lo, hi in intervals)
    out: list[list] = []
    for lo, hi in spans:
        if lo < 0 or hi < lo:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True)
class DegreeSet:
    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalise(self.intervals))
        object.__setattr__(self, "_lows", tuple(lo for lo, _ in self.intervals))

    # -- constructors
    @classmethod
    def empty(cls) -> "DegreeSet":
        return cls(())

    @classmethod
    def naturals(cls) -> "DegreeSet":
        return cls(((0, INF),))

    @classmethod
    def segment(cls, m: int, M: int) -> "DegreeSet":
        if m < 0 or M < m:
            raise ValueError(f"segment needs 0 <= m <= M, got [{m}, {M}]")
        return cls(((m, M),))

    @classmethod
    def finite(cls, values: Iterable[int]) -> "DegreeSet":
        values = sorted(set(int(v) for v in values))
        if not values:
            raise ValueError("a finite degree set must be non-empty; use DegreeSet.empty()")
        return cls(tuple((v, v) for v in values))

    @classmethod
    def at_least(cls, m: int) -> "DegreeSet":
        return cls(((m, INF),))

    # -- shape
    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_naturals(self) -> bool:
        return self.intervals == ((0, INF),)

    @property
    def is_finite(self) -> bool:
        return not self.intervals or self.intervals[-1][1] != INF

    @property
    def is_segment(self) -> bool:
        """Non-empty run of consecutive integers [m, M]."""
        return len(self.intervals) == 1 and self.is_finite

    @property
    def kind(self) -> str:
        if self.is_empty:
            return "empty"
        if self.is_naturals:
            return "nat"
        if self.is_segment:
            return "segment"
        return "finite" if self.is_finite else "cofinite"

    @property
    def min(self) -> int:
        if self.is_empty:
            raise ValueError("empty set has no minimum")
        return self.intervals[0][0]

    @property
    def max(self) -> int:
        if not self.is_finite or self.is_empty:
            raise ValueError(f"{self} has no maximum")
        return self.intervals[-1][1]

    def elements(self) -> list[int]:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return [k for lo, hi in self.intervals for k in range(lo, hi + 1)]

    # -- membership
    def __contains__(self, k) -> bool:
        k = int(k)
        if k < 0:
            raise ValueError("degrees are non-negative")
        i = bisect.bisect_right(self._lows, k) - 1
        return i >= 0 and k <= self.intervals[i][1]

    def contains(self, k: int) -> bool:
        return k in self

    def mask(self, degrees: np.ndarray) -> np.ndarray:
        """Vectorised membership over an integer array."""
        degrees = np.asarray(degrees)
        out = np.zeros(degrees.shape, dtype=bool)
        for lo, hi in self.intervals:
            if hi == INF:
                out |= degrees >= lo
            else:
                out |= (degrees >= lo) & (degrees <= hi)
        return out

    # -- algebra
    def complement(self) -> "DegreeSet":
        out, cursor = [], 0
        for lo, hi in self.intervals:
            if lo > cursor:
                out.append((cursor, lo - 1))
            if hi == INF:
                return DegreeSet(tuple(out))
            cursor = hi + 1
        out.append((cursor, INF))
        return DegreeSet(tuple(out))

    def __or__(self, other: "DegreeSet") -> "DegreeSet":
        return DegreeSet(self.intervals + other.intervals)

    def __and__(self, other: "DegreeSet") -> "DegreeSet":
        return (self.complement() | other.complement()).complement()

    def isdisjoint(self, other: "DegreeSet") -> bool:
        return (self & other).is_empty

    def covers_naturals_with(self, other: "DegreeSet") -> bool:
        return (self | other).is_naturals

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        if self.is_naturals:
            return "nat"
        if self.is_segment:
            lo, hi = self.intervals[0]
            return f"[{lo},{hi}]"
        if len(self.intervals) == 1:
            return f"[{self.intervals[0][0]},inf]"
        if self.is_finite and all(lo == hi for lo, hi in self.intervals):
            return "{" + ",".join(str(lo) for lo, _ in self.intervals) + "}"
        return "|".join(
            f"[{lo},{'inf' if hi == INF else hi}]" for lo, hi in self.intervals
        )


_SEGMENT_RE = re.compile(r"^\[\s*(\d+)\s*,\s*(\d+|inf)\s*\]$")
_FINITE_RE = re.compile(r"^\{\s*(\d+(?:\s*,\s*\d+)*)\s*\}$")


def parse_degree_set(text: str) -> DegreeSet:
    """Parse ``empty``, ``nat``, ``{0,3,7}``, ``[m,M]`` or ``[m,inf]``.

    Several pieces may be joined with ``|`` to form a union, e.g.
    ``{0}|[5,inf]``. Parsing is case-insensitive.
    """
    s = text.strip().lower()
    if "|" in s:
        parts = [parse_degree_set(p) for p in s.split("|")]
        out = parts[0]
        for p in parts[1:]:
            out = out | p
        return out
    if s in ("empty", "{}", "none"):
        return DegreeSet.empty()
    if s in ("nat", "n", "all"):
        return DegreeSet.naturals()
    if m := _SEGMENT_RE.match(s):
        lo, hi = int(m.group(1)), m.group(2)
        if hi == "inf":
            return DegreeSet.at_least(lo)
        if int(hi) < lo:
            raise ValueError(f"segment {text!r} has M < m")
        return DegreeSet.segment(lo, int(hi))
    if m := _FINITE_RE.match(s):
        return DegreeSet.finite(int(v) for v in m.group(1).split(","))
    raise ValueError(f"cannot parse degree set {text!r}")


class Regime(enum.Enum):
    """Parameter regimes: the cells of the (S_S, S_C) table plus general cases.

    Each member carries ``(sustainability, order behaviour)``.
    """

    NAT_NAT = ("sustainable", "n_t = 2^t n_0, VN_t = 1/2")
    NAT_FINITE = ("asymptotically non sustainable", "n_{t+1} >= n_t, 0 <= VN_t <= 1/2")
    NAT_EMPTY = ("non sustainable", "static: G_t = G_0, N_t = (0, 0)")
    FINITE_NAT = ("sustainable", "n_{t+1} >= n_t, 1/2 <= VN_t <= 1")
    FINITE_EMPTY = ("non sustainable", "n_{t+1} <= n_t, order eventually constant")
    EMPTY_NAT = ("sustainable", "n_t = n_0, N_t = (1, 1)")
    EMPTY_FINITE = ("depends on the parameters", "n_{t+1} <= n_t, N_t = (1, 1) while non-empty")
    EMPTY_EMPTY = ("non sustainable", "G_1 is the null graph")
    # general cases: both sets non-empty, neither equal to N
    EQUAL_SEGMENTS = ("see mean-field analysis", "S_S = S_C = [m, M]")
    PARTITION = ("general case", "order constant")
    DISJOINT = ("general case", "order non-increasing")
    COVERING = ("general case", "order non-decreasing")
    UNCOVERED = ("no analytical result", "unknown")

    @property
    def sustainability(self) -> str:
        return self.value[0]

    @property
    def behaviour(self) -> str:
        return self.value[1]

    @property
    def is_general(self) -> bool:
        return self in _GENERAL


_GENERAL = frozenset(
    {Regime.EQUAL_SEGMENTS, Regime.PARTITION, Regime.DISJOINT, Regime.COVERING, Regime.UNCOVERED}
)

_TABLE = {
    ("nat", "nat"): Regime.NAT_NAT,
    ("nat", "finite"): Regime.NAT_FINITE,
    ("nat", "empty"): Regime.NAT_EMPTY,
    ("finite", "nat"): Regime.FINITE_NAT,
    ("finite", "empty"): Regime.FINITE_EMPTY,
    ("empty", "nat"): Regime.EMPTY_NAT,
    ("empty", "finite"): Regime.EMPTY_FINITE,
    ("empty", "empty"): Regime.EMPTY_EMPTY,
}


def _row(s: DegreeSet) -> str:
    if s.is_empty:
        return "empty"
    if s.is_naturals:
        return "nat"
    return "finite" if s.is_finite else "cofinite"


def classify(ss: DegreeSet, sc: DegreeSet) -> Regime:
    cell = _TABLE.get((_row(ss), _row(sc)))
    if cell is not None:
        return cell
    if ss == sc and ss.is_segment:
        return Regime.EQUAL_SEGMENTS
    disjoint = ss.isdisjoint(sc)
    covering = ss.covers_naturals_with(sc)
    if disjoint and covering:
        return Regime.PARTITION
    if disjoint:
        return Regime.DISJOINT
    if covering:
        return Regime.COVERING
    return Regime.UNCOVERED


class Monotonicity(enum.Enum):
    NON_INCREASING = "non-increasing"
    NON_DECREASING = "non-decreasing"
    CONSTANT = "constant"
    UNKNOWN = "unknown"


def predicted_order_monotonicity(ss: DegreeSet, sc: DegreeSet) -> Monotonicity:
    """Order trend guaranteed by set shape alone.

    Disjoint sets can only shrink the graph (no vertex both survives and
    spawns); sets covering N can only grow it (every vertex survives, spawns,
    or both). A partition does both.
    """
    disjoint = ss.isdisjoint(sc)
    covering = ss.covers_naturals_with(sc)
    if disjoint and covering:
        return Monotonicity.CONSTANT
    if disjoint:
        return Monotonicity.NON_INCREASING
    if covering:
        return Monotonicity.NON_DECREASING
    return Monotonicity.UNKNOWN
