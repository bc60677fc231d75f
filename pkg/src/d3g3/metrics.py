"""Nervousness (Jaccard distance between consecutive snapshots) and
sustainability verdicts.

Nervousness values are exact :class:`fractions.Fraction` objects, or
``None`` when both sets are empty (0/0 is undefined, and reporting 0 there
would wrongly read as "static").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np


def _sorted_unique(a) -> np.ndarray:
    if isinstance(a, np.ndarray):
        arr = a.ravel()
        if len(arr) > 1 and not np.all(arr[1:] > arr[:-1]):
            arr = np.unique(arr)
        return arr
    return np.unique(np.fromiter(a, dtype=np.int64)) if a else np.empty(0, dtype=np.int64)


def jaccard_parts(a, b) -> tuple[int, int]:
    """``(|a △ b|, |a ∪ b|)`` for two collections of hashable ids.

    Python sets (of any hashable items) go through set algebra; integer numpy
    arrays use a sorted-merge intersection.
    """
    if isinstance(a, (set, frozenset)) and isinstance(b, (set, frozenset)):
        inter = len(a & b)
        na, nb = len(a), len(b)
    else:
        a, b = _sorted_unique(a), _sorted_unique(b)
        inter = int(np.intersect1d(a, b, assume_unique=True).size)
        na, nb = len(a), len(b)
    return na + nb - 2 * inter, na + nb - inter


def jaccard_distance(a, b) -> Optional[Fraction]:
    sym, union = jaccard_parts(a, b)
    if union == 0:
        return None
    return Fraction(sym, union)


def vertex_nervousness(v_t, v_t1) -> Optional[Fraction]:
    """VN_t over vertex-id collections."""
    return jaccard_distance(v_t, v_t1)


def _edge_collection(e):
    if isinstance(e, (set, frozenset)):
        return {tuple(sorted(x)) for x in e}
    e = np.asarray(e)
    if e.ndim == 2:
        e = np.sort(e, axis=1)
        return np.sort((e[:, 0].astype(np.int64) << 32) | e[:, 1].astype(np.int64))
    return e


def edge_nervousness(e_t, e_t1) -> Optional[Fraction]:
    """EN_t over edge collections.

    Accepts sets of id pairs (in any orientation), (E, 2) id arrays, or the
    packed int64 keys of :attr:`GraphSnapshot.edge_keys`.
    """
    return jaccard_distance(_edge_collection(e_t), _edge_collection(e_t1))


def graph_nervousness(g_t, g_t1) -> tuple[Optional[Fraction], Optional[Fraction]]:
    return (
        vertex_nervousness(g_t.ids, g_t1.ids),
        edge_nervousness(g_t.edge_keys, g_t1.edge_keys),
    )


def segment_nervousness(n_t: int, s_t: int) -> Fraction:
    """Closed form ``n_t / (n_t + s_t)`` of VN_t when S_S = S_C."""
    if n_t <= 0:
        raise ValueError("order must be positive")
    if not 0 <= s_t <= n_t:
        raise ValueError("survivor count must lie in [0, n_t]")
    return Fraction(n_t, n_t + s_t)


@dataclass(frozen=True)
class StepSummary:
    """One transition ``t -> t+1``.

    ``conserved`` and ``created`` come from the rules (vertices whose degree
    hit S_S, resp. S_C); ``vn``/``en`` from the raw id sets.
    """

    t: int
    order: int
    next_order: int
    conserved: int
    created: int
    vn: Optional[Fraction]
    en: Optional[Fraction]


def summarize_step(g_t, g_t1, conserved: int, created: int, edges: bool = True) -> StepSummary:
    en = edge_nervousness(g_t.edge_keys, g_t1.edge_keys) if edges else None
    return StepSummary(
        t=g_t.t,
        order=g_t.order,
        next_order=g_t1.order,
        conserved=conserved,
        created=created,
        vn=vertex_nervousness(g_t.ids, g_t1.ids),
        en=en,
    )


BECAME_NULL, FROZE, SURVIVED = "became_null", "froze", "survived_budget"


@dataclass(frozen=True)
class Verdict:
    kind: str
    t: int

    @property
    def failed(self) -> bool:
        return self.kind != SURVIVED


def sustainability_verdict(trajectory) -> Verdict:
    """Which failure condition, if any, the trajectory hit within its budget.

    ``survived_budget`` is evidence of sustainability, not a proof.
    """
    kind = {"null": BECAME_NULL, "frozen": FROZE, "budget": SURVIVED}[trajectory.reason]
    return Verdict(kind, trajectory.final_t)


def mean_nervousness(summaries) -> Optional[float]:
    """Mean VN over the steps where it is defined."""
    vals = [float(s.vn) for s in summaries if s.vn is not None]
    return math.fsum(vals) / len(vals) if vals else None
