"""Order-only simulation of the redistributed model.

Here survivors are re-placed uniformly each step, so every snapshot is a
fresh random geometric graph and the order is a Markov chain:
``n_{t+1} = 2 * Binomial(n_t, P(S, d, n_t))``. No positions are ever drawn.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .generator import derive_seed
from .mean_field import SegmentParams, survival_probability


@dataclass(frozen=True)
class OrderChain:
    params: SegmentParams
    orders: tuple
    rng_seed: Optional[int] = None

    def __post_init__(self):
        for n in self.orders[1:]:
            # n_{t+1} counts survivors, each of which spawns exactly once
            assert n >= 0 and n % 2 == 0, f"odd or negative order {n} in chain"

    @property
    def absorbed(self) -> bool:
        return self.orders[-1] == 0

    @property
    def survivors(self) -> list[int]:
        return [n // 2 for n in self.orders[1:]]


def redistributed_step(n: int, params: SegmentParams, rng: np.random.Generator) -> int:
    if n < 0:
        raise ValueError("order must be non-negative")
    if n == 0:
        return 0
    return 2 * int(rng.binomial(n, survival_probability(params, n)))


def redistributed_run(n0: int, params: SegmentParams, steps: int, seed: int) -> OrderChain:
    """Iterate :func:`redistributed_step` up to ``steps`` times, stopping at 0."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if n0 < 0:
        raise ValueError("order must be non-negative")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    orders = [int(n0)]
    for _ in range(steps):
        if orders[-1] == 0:
            break
        orders.append(redistributed_step(orders[-1], params, rng))
    return OrderChain(params, tuple(orders), seed)


def redistributed_ensemble(n0: int, params: SegmentParams, steps: int, replicates: int, seed: int) -> list[OrderChain]:
    """Replicate ``i`` uses ``derive_seed(seed, i)``; returned in replicate order."""
    return [redistributed_run(n0, params, steps, derive_seed(seed, i)) for i in range(replicates)]


def write_chains(handle, chains: Iterable[OrderChain]) -> None:
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(["replicate", "t", "order"])
    for r, chain in enumerate(chains):
        for t, n in enumerate(chain.orders):
            w.writerow([r, t, n])
