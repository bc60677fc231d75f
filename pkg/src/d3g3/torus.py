"""Geometry of the 2D unit torus [0, 1)^2 with wrap-around distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_THRESHOLD = math.sqrt(2.0) / 2.0
# pi * d^2 is the exact disk area only while the disk fits inside the unit square
ANALYTIC_MAX_THRESHOLD = 0.5


def _wrap(c: float) -> float:
    c = float(c) % 1.0
    # tiny negative inputs round up to exactly 1.0
    return 0.0 if c >= 1.0 else c


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _wrap(self.x))
        object.__setattr__(self, "y", _wrap(self.y))


def _axis_gap(a: float, b: float) -> float:
    g = abs(a - b)
    return min(g, 1.0 - g)


def toroidal_distance(a: TorusPoint, b: TorusPoint) -> float:
    dx = _axis_gap(a.x, b.x)
    dy = _axis_gap(a.y, b.y)
    return math.sqrt(dx * dx + dy * dy)


def within(a: TorusPoint, b: TorusPoint, d: float) -> bool:
    """Edge predicate ``dist(a, b) <= d``, evaluated on squared distances.

    Every code path that builds edges (scalar, all-pairs, cell grid) uses
    this exact squared comparison so that they agree bit for bit.
    """
    dx = _axis_gap(a.x, b.x)
    dy = _axis_gap(a.y, b.y)
    return dx * dx + dy * dy <= d * d


def toroidal_distances(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised wrap-around distance between broadcastable (..., 2) arrays."""
    g = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))
    g = np.minimum(g, 1.0 - g)
    return np.sqrt((g * g).sum(axis=-1))


def check_threshold(d: float) -> float:
    """Validate a simulation threshold, 0 < d < sqrt(2)/2."""
    d = float(d)
    if not (0.0 < d < MAX_THRESHOLD):
        raise ValueError(f"threshold d must lie in (0, sqrt(2)/2), got {d}")
    return d


def check_analytic_threshold(d: float) -> float:
    d = float(d)
    if not (0.0 < d <= ANALYTIC_MAX_THRESHOLD):
        raise ValueError(
            f"analytical formulas need 0 < d <= 1/2 (disk must fit the torus), got {d}"
        )
    return d


def connection_probability(d: float) -> float:
    """Probability that two independent uniform points lie within ``d``: pi d^2."""
    d = check_analytic_threshold(d)
    return math.pi * d * d


def uniform_points(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. uniform positions on the torus as an (n, 2) array."""
    return rng.random((n, 2))
