"""Numerical checkers for the local-time and scenery concentration bounds.

Each checker estimates the left-hand probability by replica Monte Carlo
(Wilson 95% CI) and evaluates the analytic right-hand side as a pure
function of its parameters.  Constants the analysis only proves to exist
(M, B_q, c_q) are calibrated at one parameter point and then frozen, so
domination elsewhere is a real check rather than a tautology.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..regen import escape_probability, threshold_rate
from ..replicas import gather_array, local_time_profile
from ..rng import replica_stream
from ..rwrs import lattice_light_threshold
from ..scenery import SceneryDistribution
from ..walks import LATTICE, TREE, GraphSpec
from .tails import wilson_interval


@dataclass
class BoundCheck:
    """Empirical LHS probability vs analytic RHS, and whether the bound
    holds (RHS above the CI's lower end)."""

    lemma: str
    params: dict
    p_hat: float
    ci_low: float
    ci_high: float
    replicas: int
    hits: int
    rhs: float
    holds: bool
    details: dict = field(default_factory=dict)


def _safe_exp(x: float) -> float:
    # overflowing RHS values mean the bound is vacuously true at these
    # parameters; report +inf instead of raising
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


# statistics computable from one replica's local-time profile
_STATS = {
    "level_set": lambda c, p: float(np.count_nonzero(c > p)),
    "heavy_mass": lambda c, p: float(c[c >= p].sum()),
    "heavy_mass_strict": lambda c, p: float(c[c > p].sum()),
    "max": lambda c, p: float(c.max()),
    "silt2": lambda c, p: float(np.dot(c.astype(np.float64), c.astype(np.float64))),
    "silt3": lambda c, p: float((c.astype(np.float64) ** 3).sum()),
}


@dataclass(frozen=True)
class _ProfileStatTask:
    graph: GraphSpec
    n: int
    seed: int
    stat: str
    stat_param: float

    def run_chunk(self, lo: int, hi: int) -> np.ndarray:
        fn = _STATS[self.stat]
        out = np.empty(hi - lo)
        for r in range(lo, hi):
            counts, _, _ = local_time_profile(self.graph, self.n, self.seed, r)
            out[r - lo] = fn(counts, self.stat_param)
        return out


def profile_statistics(
    graph: GraphSpec,
    n: int,
    replicas: int,
    seed: int,
    stat: str,
    stat_param: float = 0.0,
    parallelism: Optional[int] = 1,
) -> np.ndarray:
    """One local-time statistic per replica."""
    task = _ProfileStatTask(graph=graph, n=n, seed=seed, stat=stat, stat_param=stat_param)
    return gather_array(task, replicas, parallelism)


def _check(lemma, params, values, threshold, rhs, replicas, details=None) -> BoundCheck:
    hits = int(np.count_nonzero(values >= threshold))
    lo, hi = wilson_interval(hits, replicas)
    return BoundCheck(
        lemma=lemma,
        params=params,
        p_hat=hits / replicas,
        ci_low=lo,
        ci_high=hi,
        replicas=replicas,
        hits=hits,
        rhs=rhs,
        holds=bool(rhs >= lo),
        details=details or {},
    )


# -- level sets --------------------------------------------------------------


def level_set_rhs(n: int, t: float, u: float, beta: float, m_const: float = 1.0) -> float:
    """exp(M n exp(-beta t / 2) - beta t u)."""
    return _safe_exp(m_const * n * math.exp(-beta * t / 2.0) - beta * t * u)


def level_set_bound_check(
    d: int,
    n: int,
    t: float,
    u: float,
    beta: float,
    replicas: int,
    seed: int,
    m_const: float = 1.0,
    parallelism: Optional[int] = 1,
) -> BoundCheck:
    """P(L_n(t) >= u) against exp(M n exp(-beta t/2) - beta t u) on the
    d-ary tree, for beta in (0, rate/2].  M = 1 is the conservative default."""
    rate = threshold_rate(d)
    if rate <= 0:
        raise ValueError("level-set bound needs branching d >= 3 (positive rate)")
    if not 0.0 < beta <= rate / 2.0:
        raise ValueError(f"beta must lie in (0, {rate / 2.0:g}] for d = {d}")
    if t < 1 or u < 1:
        raise ValueError("the bound assumes t >= 1 and u >= 1")
    values = profile_statistics(
        GraphSpec(TREE, d), n, replicas, seed, "level_set", t, parallelism
    )
    return _check(
        "level_set",
        {"d": d, "n": n, "t": t, "u": u, "beta": beta, "m_const": m_const},
        values,
        u,
        level_set_rhs(n, t, u, beta, m_const),
        replicas,
    )


# -- heavy mass (tree) -------------------------------------------------------


def heavy_mass_rhs(d: int, u: float, m_const: float) -> float:
    """M exp(-rate_d u / 2)."""
    return m_const * math.exp(-threshold_rate(d) * u / 2.0)


def heavy_mass_bound_check(
    d: int,
    n: int,
    u: float,
    replicas: int,
    seed: int,
    m_const: float,
    parallelism: Optional[int] = 1,
) -> BoundCheck:
    """P(heavy mass >= u) against M exp(-rate u / 2), where the heavy mass
    sums local times >= (4/rate) log n on the tree."""
    rate = threshold_rate(d)
    if rate <= 0:
        raise ValueError("heavy-mass bound needs branching d >= 3")
    if u < 1:
        raise ValueError("the bound assumes u >= 1")
    thr = 4.0 / rate * math.log(n)
    values = profile_statistics(
        GraphSpec(TREE, d), n, replicas, seed, "heavy_mass", thr, parallelism
    )
    return _check(
        "heavy_mass",
        {"d": d, "n": n, "u": u, "m_const": m_const, "threshold": thr},
        values,
        u,
        heavy_mass_rhs(d, u, m_const),
        replicas,
    )


def calibrate_heavy_mass_constant(
    d: int, n: int, u: float, replicas: int, seed: int, parallelism: Optional[int] = 1
) -> float:
    """Smallest M making the heavy-mass bound hold at this (small) u; the
    constant is then frozen and verified at larger u."""
    rate = threshold_rate(d)
    thr = 4.0 / rate * math.log(n)
    values = profile_statistics(
        GraphSpec(TREE, d), n, replicas, seed, "heavy_mass", thr, parallelism
    )
    hits = int(np.count_nonzero(values >= u))
    lo, _ = wilson_interval(hits, replicas)
    return lo * math.exp(rate * u / 2.0)


# -- maximum local time ------------------------------------------------------


def max_rhs(graph: GraphSpec, n: int, x: float, escape_prob: Optional[float] = None) -> float:
    """n exp(-c1 (x-1)) with c1 read off the return-probability bound:
    c1 = -log(1 - (d/(d+1)) p_o) on the tree, -log(1 - p) on Z^d."""
    if graph.kind == TREE:
        p_o = escape_probability(graph.d)
        c1 = -math.log(1.0 - graph.d / (graph.d + 1.0) * p_o)
    else:
        if escape_prob is None:
            raise ValueError("lattice max bound needs an escape probability")
        c1 = -math.log(1.0 - escape_prob)
    return n * math.exp(-c1 * (x - 1.0))


def max_bound_check(
    graph: GraphSpec,
    n: int,
    x: float,
    replicas: int,
    seed: int,
    escape_prob: Optional[float] = None,
    parallelism: Optional[int] = 1,
) -> BoundCheck:
    """P(max local time >= x) against n exp(-c1 (x-1))."""
    if x < 1:
        raise ValueError("the bound assumes x >= 1")
    values = profile_statistics(graph, n, replicas, seed, "max", 0.0, parallelism)
    return _check(
        "max_local_time",
        {"graph": graph.to_json(), "n": n, "x": x, "escape_prob": escape_prob},
        values,
        x,
        max_rhs(graph, n, x, escape_prob),
        replicas,
    )


# -- self-intersection local time --------------------------------------------


def silt_rhs(n: int, q: int, c_q: float) -> float:
    """exp(-c_q n^(1/q))."""
    return math.exp(-c_q * n ** (1.0 / q))


def silt_bound_check(
    graph: GraphSpec,
    n: int,
    q: int,
    b_q: float,
    replicas: int,
    seed: int,
    c_q: float,
    parallelism: Optional[int] = 1,
) -> BoundCheck:
    """P(sum l^q >= B_q n) against exp(-c_q n^(1/q)); B_q and c_q are
    calibrated constants."""
    if q not in (2, 3):
        raise ValueError("only q = 2 and q = 3 are supported")
    values = profile_statistics(
        graph, n, replicas, seed, f"silt{q}", 0.0, parallelism
    )
    return _check(
        f"silt{q}",
        {"graph": graph.to_json(), "n": n, "q": q, "b_q": b_q, "c_q": c_q},
        values,
        b_q * n,
        silt_rhs(n, q, c_q),
        replicas,
        details={"mean_stat_over_n": float(values.mean() / n)},
    )


def calibrate_silt_rate(
    graph: GraphSpec,
    n: int,
    q: int,
    b_q: float,
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
) -> float:
    """Largest decay constant c_q consistent with the empirical tail at this
    n (so exp(-c_q n^(1/q)) equals the CI's lower end); frozen afterwards."""
    values = profile_statistics(graph, n, replicas, seed, f"silt{q}", 0.0, parallelism)
    hits = int(np.count_nonzero(values >= b_q * n))
    lo, _ = wilson_interval(hits, replicas)
    if lo <= 0.0:
        raise ValueError("calibration point saw no events; pick a smaller b_q or n")
    return -math.log(lo) / n ** (1.0 / q)


# -- lattice heavy mass ------------------------------------------------------


def lattice_heavy_mass_rhs(d: int, n: int, y_n: float, c1: float) -> float:
    """exp(-C1 y^(2d/(d+2)) (log n)^(2/(d+2)))."""
    return math.exp(
        -c1 * y_n ** (2.0 * d / (d + 2)) * math.log(n) ** (2.0 / (d + 2))
    )


def lattice_heavy_mass_check(
    d: int,
    n: int,
    y_n: float,
    replicas: int,
    seed: int,
    c1: float,
    parallelism: Optional[int] = 1,
    shell_sample: int = 200,
) -> BoundCheck:
    """P(sum of local times above t* >= y^2) on Z^d, with the dyadic-shell
    occupancies |D_k| (t* 2^k < l <= t* 2^(k+1)) reported as diagnostics."""
    if d < 3:
        raise ValueError("lattice heavy-mass check requires d >= 3")
    t_star = lattice_light_threshold(y_n, n, d)
    graph = GraphSpec(LATTICE, d)
    values = profile_statistics(
        graph, n, replicas, seed, "heavy_mass_strict", t_star, parallelism
    )
    shells: dict = {}
    sample = min(shell_sample, replicas)
    for r in range(sample):
        counts, _, _ = local_time_profile(graph, n, seed, r)
        heavy = counts[counts > t_star]
        if heavy.size:
            ks = np.floor(np.log2(heavy / t_star)).astype(int)
            for k, cnt in zip(*np.unique(ks, return_counts=True)):
                shells[int(k)] = shells.get(int(k), 0) + int(cnt)
    mean_shells = {k: v / sample for k, v in sorted(shells.items())}
    return _check(
        "lattice_heavy_mass",
        {"d": d, "n": n, "y_n": y_n, "t_star": t_star, "c1": c1},
        values,
        y_n * y_n,
        lattice_heavy_mass_rhs(d, n, y_n, c1),
        replicas,
        details={"mean_shell_occupancy": mean_shells},
    )


def calibrate_lattice_heavy_mass_rate(
    d: int,
    n: int,
    y_n: float,
    replicas: int,
    seed: int,
    parallelism: Optional[int] = 1,
) -> float:
    """Largest C1 consistent with the empirical tail at this (n, y_n)."""
    t_star = lattice_light_threshold(y_n, n, d)
    values = profile_statistics(
        GraphSpec(LATTICE, d), n, replicas, seed, "heavy_mass_strict", t_star, parallelism
    )
    hits = int(np.count_nonzero(values >= y_n * y_n))
    lo, _ = wilson_interval(hits, replicas)
    if lo <= 0.0:
        raise ValueError("calibration point saw no events; pick a smaller y_n or n")
    return -math.log(lo) / (
        y_n ** (2.0 * d / (d + 2)) * math.log(n) ** (2.0 / (d + 2))
    )


# -- scenery exceedance counts -----------------------------------------------


def scenery_count_rhs(
    dist: SceneryDistribution, n: int, y_n: float, m: int, x: float
) -> float:
    """(e E|xi|^m y^m log^(2m) n / (x n^(m/2-1)))^x."""
    if x <= 0:
        raise ValueError("x must be positive")
    base = (
        math.e
        * dist.abs_moment(m)
        * y_n**m
        * math.log(n) ** (2 * m)
        / (x * n ** (m / 2.0 - 1.0))
    )
    if base == 0.0:
        return 0.0
    return _safe_exp(x * math.log(base))


def scenery_count_check(
    dist: SceneryDistribution,
    n: int,
    y_n: float,
    m: int,
    x: float,
    replicas: int,
    seed: int,
) -> BoundCheck:
    """P(#{v : |xi(v)| >= sqrt(n)/(y_n log^2 n)} >= x) for the worst-case
    range of n vertices, against the Chernoff RHS.

    The analytic bound covers any walk whose range is at most n, so the
    check draws n i.i.d. scenery values per replica (the extremal case).
    """
    thr = math.sqrt(n) / (y_n * math.log(n) ** 2)
    rhs = scenery_count_rhs(dist, n, y_n, m, x)
    gen = replica_stream(seed)
    hits = 0
    batch = max(1, (1 << 22) // n)
    done = 0
    while done < replicas:
        b = min(batch, replicas - done)
        xi = dist.sample_from_uniform(gen.random((b, n)))
        counts = np.count_nonzero(np.abs(xi) >= thr, axis=1)
        hits += int(np.count_nonzero(counts >= x))
        done += b
    lo, hi = wilson_interval(hits, replicas)
    return BoundCheck(
        lemma="scenery_count",
        params={
            "dist": dist.to_json(),
            "n": n,
            "y_n": y_n,
            "m": m,
            "x": x,
            "threshold": thr,
        },
        p_hat=hits / replicas,
        ci_low=lo,
        ci_high=hi,
        replicas=replicas,
        hits=hits,
        rhs=rhs,
        holds=bool(rhs >= lo),
    )
