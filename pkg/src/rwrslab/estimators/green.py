"""Monte Carlo estimate of the lattice Green's function at the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .. import _fast
from ..replicas import compensated_total, map_chunks
from ..rng import replica_stream
from .tails import Z95


@dataclass
class GreenEstimate:
    """Mean number of visits to the origin up to a horizon (time 0 included),
    with a normal-theory CI.  Horizon truncation biases the estimate low;
    compare two horizons to bound the tail bias."""

    d: int
    horizon: int
    replicas: int
    value: float
    se: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class _GreenTask:
    d: int
    horizons: tuple
    seed: int

    def run_chunk(self, lo: int, hi: int) -> np.ndarray:
        cps = np.array(self.horizons, dtype=np.int64)
        n = int(cps.max())
        sums = np.zeros((len(self.horizons), 2))
        for r in range(lo, hi):
            gen = replica_stream(self.seed, r)
            v = _fast.lattice_origin_visits(self.d, gen.random(n), cps)
            sums[:, 0] += v
            sums[:, 1] += v.astype(np.float64) ** 2
        return sums


def green_function_mc_multi(
    d: int,
    horizons: Sequence[int],
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
):
    """Green's-function estimates at several horizons from shared runs, so
    the horizon comparison is free of independent-sampling noise."""
    if d < 3:
        raise ValueError("the walk is recurrent below d = 3; Green's function diverges")
    if min(horizons) < 1 or replicas < 2:
        raise ValueError("need horizon >= 1 and at least two replicas")
    horizons = tuple(int(h) for h in horizons)
    if list(horizons) != sorted(set(horizons)):
        raise ValueError("horizons must be strictly increasing")
    task = _GreenTask(d=d, horizons=horizons, seed=seed)
    parts = map_chunks(task, replicas, parallelism)
    out = []
    for i, h in enumerate(horizons):
        total = compensated_total(p[i, 0] for p in parts)
        total_sq = compensated_total(p[i, 1] for p in parts)
        mean = total / replicas
        var = max(0.0, total_sq / replicas - mean * mean)
        se = math.sqrt(var / replicas)
        out.append(
            GreenEstimate(
                d=d,
                horizon=h,
                replicas=replicas,
                value=mean,
                se=se,
                ci_low=mean - Z95 * se,
                ci_high=mean + Z95 * se,
            )
        )
    return out


def green_function_mc(
    d: int, horizon: int, replicas: int, seed: int, parallelism: Optional[int] = 1
) -> GreenEstimate:
    """Mean visits to the origin over [0, horizon]."""
    return green_function_mc_multi(d, [horizon], replicas, seed, parallelism)[0]
