"""Plain Monte Carlo tail estimation for the self-normalized statistic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..replicas import gather_array, local_time_profile
from ..rwrs import summary_from_arrays
from ..scenery import SceneryDistribution
from ..walks import LATTICE, GraphSpec

# 95% two-sided normal quantile, pinned for reproducible intervals
Z95 = 1.959963984540054


def wilson_interval(hits: int, trials: int, z: float = Z95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


@dataclass
class TailEstimate:
    """Estimated tail probability with Wilson CI and empirical rates.

    ``rate`` is y^-2 log p_hat; ``rate_lattice`` the lattice scaling
    y^(-2d/(d+2)) (log n)^(-2/(d+2)) log p_hat (None on trees).  Both are
    NaN when p_hat = 0: plain MC asserts nothing below its resolution.
    """

    y: float
    p_hat: float
    ci_low: float
    ci_high: float
    replicas: int
    hits: int
    rate: float
    rate_lattice: Optional[float]
    ci_method: str = "wilson"


@dataclass(frozen=True)
class _WSamplesTask:
    graph: GraphSpec
    dist: SceneryDistribution
    n: int
    seed: int

    def run_chunk(self, lo: int, hi: int) -> np.ndarray:
        out = np.empty(hi - lo)
        for r in range(lo, hi):
            counts, _, gen = local_time_profile(self.graph, self.n, self.seed, r)
            xi = self.dist.sample_from_uniform(gen.random(counts.shape[0]))
            out[r - lo] = summary_from_arrays(counts, xi, self.n)[3]
        return out


def w_samples(
    graph: GraphSpec,
    dist: SceneryDistribution,
    n: int,
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
) -> np.ndarray:
    """Self-normalized statistic over independent replicas.

    Replica r is a pure function of (graph, dist, n, seed, r).
    """
    task = _WSamplesTask(graph=graph, dist=dist, n=n, seed=seed)
    return gather_array(task, replicas, parallelism)


def estimate_from_samples(
    w: np.ndarray, y: float, graph: GraphSpec, n: int
) -> TailEstimate:
    hits = int(np.count_nonzero(w >= y))
    replicas = int(w.shape[0])
    p = hits / replicas
    lo, hi = wilson_interval(hits, replicas)
    if p > 0.0 and y != 0.0:
        rate = math.log(p) / (y * y)
        rate_lat = None
        if graph.kind == LATTICE:
            d = graph.d
            rate_lat = (
                abs(y) ** (-2.0 * d / (d + 2))
                * math.log(n) ** (-2.0 / (d + 2))
                * math.log(p)
            )
    else:
        rate = math.nan
        rate_lat = math.nan if graph.kind == LATTICE else None
    return TailEstimate(
        y=y,
        p_hat=p,
        ci_low=lo,
        ci_high=hi,
        replicas=replicas,
        hits=hits,
        rate=rate,
        rate_lattice=rate_lat,
    )


def tail_mc_multi(
    graph: GraphSpec,
    dist: SceneryDistribution,
    n: int,
    ys: Sequence[float],
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
):
    """Tail estimates at several levels on a shared replica set (common
    random numbers), so p_hat is monotone non-increasing in y."""
    if replicas < 1000:
        raise ValueError("tail estimation requires at least 10^3 replicas")
    w = w_samples(graph, dist, n, replicas, seed, parallelism)
    return [estimate_from_samples(w, y, graph, n) for y in ys]


def tail_mc(
    graph: GraphSpec,
    dist: SceneryDistribution,
    n: int,
    y: float,
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
) -> TailEstimate:
    """Fraction of replicas with W >= y, with CI and empirical rates."""
    return tail_mc_multi(graph, dist, n, [y], replicas, seed, parallelism)[0]


def quadratic_rate_constant(rate: float) -> float:
    """The quadratic upper-bound constant (1 - sqrt(24/rate))^2.

    Only effective for rate >= 24 (it tends to 1 as the rate grows); below
    that no positive constant is produced and the caller is told so.
    """
    if rate < 24.0:
        raise ValueError(
            f"no effective constant: rate {rate:g} <= 24 gives no positive bound"
        )
    return (1.0 - math.sqrt(24.0 / rate)) ** 2
