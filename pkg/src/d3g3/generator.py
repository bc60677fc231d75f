"""The D3G3 evolution process.

Every vertex of ``G_t`` reads its degree once. It survives into ``G_{t+1}``
iff the degree is in ``ss`` and spawns one fresh, uniformly placed vertex iff
the degree is in ``sc``. Vertex ids come from a monotone counter and are never
reused, so a removed vertex cannot reappear.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import spatial
from .degree_sets import DegreeSet
from .metrics import StepSummary, summarize_step
from .torus import TorusPoint, check_threshold, uniform_points

# pair keys pack (u, v) into one int64; ids must stay below 2**31
_ID_LIMIT = 2 ** 31


@dataclass(frozen=True, eq=False)
class GraphSnapshot:
    """One static graph ``G_t``.

    ``ids`` is sorted ascending and row ``i`` of ``positions`` belongs to
    ``ids[i]``. Edges are never stored independently: they are derived from
    positions and ``d`` on first access, which keeps the edge set consistent
    with the geometry by construction.
    """

    t: int
    ids: np.ndarray
    positions: np.ndarray
    d: float
    next_id: int
    method: str = "auto"

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        pos = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)
        if len(ids) != len(pos):
            raise ValueError("ids and positions differ in length")
        if len(ids) > 1 and not np.all(ids[1:] > ids[:-1]):
            raise ValueError("vertex ids must be strictly increasing")
        if len(ids) and (ids[0] < 0 or ids[-1] >= self.next_id):
            raise ValueError("vertex ids must lie in [0, next_id)")
        if self.next_id >= _ID_LIMIT:
            raise OverflowError("vertex id counter exhausted")
        ids.setflags(write=False)
        pos.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "positions", pos)

    @property
    def order(self) -> int:
        return len(self.ids)

    def __len__(self):
        return len(self.ids)

    @property
    def is_null(self) -> bool:
        return len(self.ids) == 0

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = spatial.degrees(self.positions, self.d, self.method)
        deg.setflags(write=False)
        return deg

    @cached_property
    def edges(self) -> np.ndarray:
        """Edges as an (E, 2) array of vertex ids with ``u < v``, sorted."""
        pairs = spatial.neighbour_pairs(self.positions, self.d, self.method)
        e = self.ids[pairs] if len(pairs) else np.empty((0, 2), dtype=np.int64)
        e.setflags(write=False)
        return e

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted int64 keys ``u * 2**32 + v``, one per edge."""
        e = self.edges
        keys = np.sort((e[:, 0] << 32) | e[:, 1])
        keys.setflags(write=False)
        return keys

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def vertex_set(self) -> set[int]:
        return set(self.ids.tolist())

    @property
    def vertices(self) -> dict[int, TorusPoint]:
        return {int(i): TorusPoint(x, y) for i, (x, y) in zip(self.ids, self.positions)}

    def position(self, vid: int) -> TorusPoint:
        i = np.searchsorted(self.ids, vid)
        if i == len(self.ids) or self.ids[i] != vid:
            raise KeyError(vid)
        x, y = self.positions[i]
        return TorusPoint(x, y)


def snapshot_from_positions(positions, d: float, t: int = 0, method: str = "auto") -> GraphSnapshot:
    """Snapshot with ids ``0..n-1`` in the order of ``positions``."""
    pos = np.asarray(positions, dtype=np.float64).reshape(-1, 2) % 1.0
    pos[pos >= 1.0] = 0.0
    n = len(pos)
    return GraphSnapshot(t, np.arange(n, dtype=np.int64), pos, check_threshold(d), n, method)


def random_geometric_graph(n: int, d: float, rng: np.random.Generator, method: str = "auto") -> GraphSnapshot:
    if n < 0:
        raise ValueError("order must be non-negative")
    return snapshot_from_positions(uniform_points(n, rng), d, 0, method)


@dataclass(frozen=True)
class GeneratorConfig:
    d: float
    ss: DegreeSet
    sc: DegreeSet
    seed_order: int = 100
    rng_seed: int = 0
    initial_positions: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    method: str = "auto"

    def __post_init__(self):
        check_threshold(self.d)
        if self.initial_positions is None and self.seed_order < 1:
            raise ValueError("the seed graph must be non-empty (seed_order >= 1)")
        if self.initial_positions is not None and len(self.initial_positions) < 1:
            raise ValueError("the seed graph must be non-empty")
        if not 0 <= int(self.rng_seed) < 2 ** 64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(int(self.rng_seed)))

    def seed_graph(self, rng: np.random.Generator) -> GraphSnapshot:
        if self.initial_positions is not None:
            return snapshot_from_positions(self.initial_positions, self.d, 0, self.method)
        return random_geometric_graph(self.seed_order, self.d, rng, self.method)

    def replicate(self, index: int) -> "GeneratorConfig":
        """Config for replicate ``index`` with an independent derived seed."""
        return dataclasses.replace(self, rng_seed=derive_seed(self.rng_seed, index))


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed of ``seed`` along a spawn path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class StepResult:
    snapshot: GraphSnapshot
    conserved: int
    creators: int


def _advance(g: GraphSnapshot, cfg: GeneratorConfig, rng: np.random.Generator) -> StepResult:
    if g.is_null:
        nxt = GraphSnapshot(g.t + 1, g.ids, g.positions, g.d, g.next_id, g.method)
        return StepResult(nxt, 0, 0)
    deg = g.degrees
    keep = cfg.ss.mask(deg)
    spawn = cfg.sc.mask(deg)
    k = int(spawn.sum())
    # rows of ``new`` follow creators in ascending id order
    new = uniform_points(k, rng)
    ids = np.concatenate((g.ids[keep], np.arange(g.next_id, g.next_id + k, dtype=np.int64)))
    pos = np.concatenate((g.positions[keep], new))
    nxt = GraphSnapshot(g.t + 1, ids, pos, g.d, g.next_id + k, g.method)
    return StepResult(nxt, int(keep.sum()), k)


def step(g: GraphSnapshot, cfg: GeneratorConfig, rng: np.random.Generator) -> GraphSnapshot:
    """Apply the conservation and creation rules once, simultaneously."""
    return _advance(g, cfg, rng).snapshot


def is_frozen(g: GraphSnapshot, cfg: GeneratorConfig) -> bool:
    """True when every future snapshot equals ``g`` with certainty."""
    if g.is_null:
        return True
    deg = g.degrees
    return bool(cfg.ss.mask(deg).all() and not cfg.sc.mask(deg).any())


NULL, FROZEN, BUDGET = "null", "frozen", "budget"


@dataclass
class Trajectory:
    """Outcome of :func:`run`.

    ``summary[i]`` describes the transition ``t -> t+1`` for every step taken;
    ``orders`` has one more entry than ``summary`` (the final snapshot).
    ``snapshots`` holds every snapshot when recorded, else only the first and
    last.
    """

    config: GeneratorConfig
    snapshots: list
    summary: list
    reason: str
    final_t: int

    @property
    def orders(self) -> list[int]:
        return [s.order for s in self.summary] + [self.snapshots[-1].order]

    @property
    def final(self) -> GraphSnapshot:
        return self.snapshots[-1]


def run(
    cfg: GeneratorConfig,
    max_steps: int,
    *,
    record_snapshots: bool = True,
    edge_nervousness: bool = True,
    on_step: Optional[Callable[[GraphSnapshot, GraphSnapshot, StepSummary], None]] = None,
) -> Trajectory:
    """Iterate up to ``max_steps`` times from the seed graph.

    Stops early with reason ``"null"`` (empty graph) or ``"frozen"`` (static
    forever); otherwise ``"budget"``. Same ``cfg.rng_seed`` gives the same
    trajectory bit for bit.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    rng = cfg.rng()
    g = cfg.seed_graph(rng)
    first = g
    snaps = [g]
    summary = []
    while True:
        if g.is_null:
            reason = NULL
            break
        if is_frozen(g, cfg):
            reason = FROZEN
            break
        if g.t >= max_steps:
            reason = BUDGET
            break
        res = _advance(g, cfg, rng)
        s = summarize_step(g, res.snapshot, res.conserved, res.creators, edges=edge_nervousness)
        summary.append(s)
        if on_step is not None:
            on_step(g, res.snapshot, s)
        g = res.snapshot
        if record_snapshots:
            snaps.append(g)
    if not record_snapshots:
        snaps = [first, g] if g is not first else [first]
    return Trajectory(cfg, snaps, summary, reason, g.t)


@dataclass(frozen=True)
class NodeTaxonomy:
    conserved: frozenset
    removed: frozenset
    creators: frozenset
    created: frozenset
    duplicated: frozenset

    def labels(self, vid: int) -> set[str]:
        return {name for name in ("conserved", "removed", "creators", "created", "duplicated")
                if vid in getattr(self, name)}


def node_taxonomy(g_t: GraphSnapshot, g_t1: GraphSnapshot, cfg: GeneratorConfig) -> NodeTaxonomy:
    if g_t1.t != g_t.t + 1:
        raise ValueError(f"snapshots are not consecutive (t={g_t.t}, t'={g_t1.t})")
    before, after = g_t.vertex_set(), g_t1.vertex_set()
    creators = frozenset(int(v) for v in g_t.ids[cfg.sc.mask(g_t.degrees)]) if len(g_t) else frozenset()
    conserved = frozenset(before & after)
    return NodeTaxonomy(
        conserved=conserved,
        removed=frozenset(before - after),
        creators=creators,
        created=frozenset(after - before),
        duplicated=conserved & creators,
    )
