"""Scenery-walk observables: the sums T and V^2, the self-normalized
statistic W, the three-cell decompositions, and the lower-bound machinery's
moment quantities.

Ledger-based sums use math.fsum (exact correctly-rounded totals), so the
vertex-aggregated and time-ordered forms of T agree to floating precision.
The array fast path used by the replica engine computes the same formulas
with dot products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

import numpy as np

from .localtime import LocalTimeLedger
from .scenery import SceneryAssignment, SceneryDistribution, eta_abs_central_moment
from .walks import WalkTrace


def _values(scenery) -> Mapping:
    if isinstance(scenery, SceneryAssignment):
        return scenery.values
    return scenery


def w_statistic(T: float, V2: float, silt2: int, n: int) -> float:
    """Self-normalized statistic T sqrt(n+1) / (V sqrt(silt2)).

    The n+1 matches the ledger's mass convention; Cauchy-Schwarz gives
    |W| <= sqrt(n+1).  NaN when V^2 = 0 (degenerate scenery).
    """
    if V2 <= 0.0:
        return math.nan
    return T * math.sqrt(n + 1.0) / (math.sqrt(V2) * math.sqrt(silt2))


@dataclass
class RwrsSummary:
    """Totals of one scenery-walk instance."""

    T: float
    V2: float
    silt2: int
    W: float
    n: int
    degenerate: bool  # all scenery values zero on the range: W undefined


def compute_summary(ledger: LocalTimeLedger, scenery, n: Optional[int] = None) -> RwrsSummary:
    """Vertex-aggregated sums T = sum l(v) xi(v), V^2 = sum l(v) xi(v)^2.

    ``scenery`` must cover the ledger's vertex set.
    """
    xs = _values(scenery)
    n = ledger.n if n is None else n
    T = math.fsum(c * xs[v] for v, c in ledger.counts.items())
    V2 = math.fsum(c * xs[v] * xs[v] for v, c in ledger.counts.items())
    degenerate = V2 <= 0.0
    return RwrsSummary(
        T=T,
        V2=V2,
        silt2=ledger.silt2,
        W=w_statistic(T, V2, ledger.silt2, n),
        n=n,
        degenerate=degenerate,
    )


def time_ordered_sums(trace: WalkTrace, scenery) -> Tuple[float, float]:
    """T and V^2 summed along the walk (sum_k xi(S_k)); oracle for the
    vertex-aggregated form."""
    xs = _values(scenery)
    T = math.fsum(xs[v] for v in trace.vertices)
    V2 = math.fsum(xs[v] * xs[v] for v in trace.vertices)
    return T, V2


def summary_from_arrays(counts: np.ndarray, xi: np.ndarray, n: int):
    """(T, V2, silt2, W) from a counts profile and matching scenery values."""
    c = counts.astype(np.float64)
    T = float(np.dot(c, xi))
    V2 = float(np.dot(c, xi * xi))
    silt2 = float(np.dot(c, c))
    if V2 <= 0.0:
        return T, V2, silt2, math.nan
    return T, V2, silt2, T * math.sqrt(n + 1.0) / (math.sqrt(V2) * math.sqrt(silt2))


@dataclass
class Decomposition:
    """T and V^2 split over the three cells (light local time & small scenery,
    light & large scenery, heavy local time).

    Cells partition the visited set, so the parts re-sum to the totals; the
    ``T`` / ``V2`` properties are defined as those resums.
    """

    t_parts: Tuple[float, float, float]
    v2_parts: Tuple[float, float, float]
    cell_sizes: Tuple[int, int, int]
    local_time_threshold: float
    scenery_threshold: float
    strict: bool  # tree cells use strict <; lattice cells use <=

    @property
    def T(self) -> float:
        return self.t_parts[0] + self.t_parts[1] + self.t_parts[2]

    @property
    def V2(self) -> float:
        return self.v2_parts[0] + self.v2_parts[1] + self.v2_parts[2]


def _decompose(
    ledger: LocalTimeLedger,
    scenery,
    lt_threshold: float,
    sc_threshold: float,
    strict: bool,
    two_sided_scenery: bool,
) -> Decomposition:
    xs = _values(scenery)
    parts_t = ([], [], [])
    parts_v = ([], [], [])
    sizes = [0, 0, 0]
    for v, c in ledger.counts.items():
        x = xs[v]
        light = (c < lt_threshold) if strict else (c <= lt_threshold)
        if light:
            val = abs(x) if two_sided_scenery else x
            small = (val < sc_threshold) if strict else (val <= sc_threshold)
            cell = 0 if small else 1
        else:
            cell = 2
        parts_t[cell].append(c * x)
        parts_v[cell].append(c * x * x)
        sizes[cell] += 1
    return Decomposition(
        t_parts=tuple(math.fsum(p) for p in parts_t),
        v2_parts=tuple(math.fsum(p) for p in parts_v),
        cell_sizes=tuple(sizes),
        local_time_threshold=lt_threshold,
        scenery_threshold=sc_threshold,
        strict=strict,
    )


def decompose_tree(
    ledger: LocalTimeLedger,
    scenery,
    y_n: float,
    rate: float,
    n: Optional[int] = None,
    two_sided_scenery: bool = False,
) -> Decomposition:
    """Tree decomposition: light cell {l(v) < (4/rate) log n}, small-scenery
    cell {xi(v) < sqrt(n)/(y_n log^2 n)}; strict inequalities, natural logs.

    ``rate`` is the epoch-rate constant (zero at d = 2, which is rejected).
    """
    n = ledger.n if n is None else n
    if rate <= 0.0:
        raise ValueError("threshold rate must be positive (branching d >= 3)")
    if n < 3:
        raise ValueError("decomposition thresholds need n >= 3")
    if y_n <= 0.0:
        raise ValueError("y_n must be positive")
    ln = math.log(n)
    return _decompose(
        ledger,
        scenery,
        lt_threshold=4.0 / rate * ln,
        sc_threshold=math.sqrt(n) / (y_n * ln * ln),
        strict=True,
        two_sided_scenery=two_sided_scenery,
    )


def lattice_light_threshold(y_n: float, n: int, d: int) -> float:
    """y_n^(4/(d+2)) (log n)^(d/(d+2)): the heavy/light local-time cut on Z^d."""
    ln = math.log(n)
    return y_n ** (4.0 / (d + 2)) * ln ** (d / (d + 2.0))


def decompose_lattice(
    ledger: LocalTimeLedger,
    scenery,
    y_n: float,
    d: int,
    n: Optional[int] = None,
    two_sided_scenery: bool = False,
) -> Decomposition:
    """Lattice decomposition with the d-dependent local-time cut and
    non-strict inequalities."""
    n = ledger.n if n is None else n
    if d < 3:
        raise ValueError("lattice decomposition requires d >= 3")
    if n < 3:
        raise ValueError("decomposition thresholds need n >= 3")
    if y_n <= 0.0:
        raise ValueError("y_n must be positive")
    ln = math.log(n)
    return _decompose(
        ledger,
        scenery,
        lt_threshold=lattice_light_threshold(y_n, n, d),
        sc_threshold=math.sqrt(n) / (y_n * ln * ln),
        strict=False,
        two_sided_scenery=two_sided_scenery,
    )


@dataclass
class NagaevQuantities:
    """Moment quantities entering the normal-approximation lower bound.

    For eta(v) = 2 b xi(v) - b^2 xi(v)^2 with b = y_n sqrt(silt2)/n:
    ``variance_sum`` is sum l^2(v) Var(eta), ``cubic_sum`` is
    sum l^3(v) E|eta - E eta|^3, ``lyapunov_ratio`` their Lyapunov-type
    ratio, and ``level`` the standardized deviation level.
    """

    tilt: float
    eta_mean: float
    eta_var: float
    eta_abs3: float
    variance_sum: float
    cubic_sum: float
    lyapunov_ratio: float
    level: float
    degenerate: bool


def nagaev_quantities(
    ledger: LocalTimeLedger, dist: SceneryDistribution, y_n: float, n: Optional[int] = None
) -> NagaevQuantities:
    """Compute the lower-bound moment quantities for one walk instance.

    The closed form for the variance sum assumes a standardized scenery
    (E xi^2 = 1); pass dist.standardized() otherwise.  Needs E xi^4 and
    E xi^6 finite.  b = 0 (y_n = 0) degenerates and is flagged.
    """
    n = ledger.n if n is None else n
    if abs(dist.moment(2) - 1.0) > 1e-12:
        raise ValueError("scenery must be standardized (E xi^2 = 1); use .standardized()")
    ex3 = dist.moment(3)
    ex4 = dist.moment(4)  # raises MomentError if infinite
    b = y_n * math.sqrt(ledger.silt2) / n
    if b == 0.0:
        return NagaevQuantities(
            tilt=0.0,
            eta_mean=0.0,
            eta_var=0.0,
            eta_abs3=0.0,
            variance_sum=0.0,
            cubic_sum=0.0,
            lyapunov_ratio=math.nan,
            level=math.nan,
            degenerate=True,
        )
    eta_var = 4 * b**2 - 4 * b**3 * ex3 + b**4 * (ex4 - 1.0)
    m2 = ledger.silt2 * eta_var
    eta_abs3 = eta_abs_central_moment(dist, b, power=3)
    gamma = ledger.silt3 * eta_abs3
    m = math.sqrt(m2)
    return NagaevQuantities(
        tilt=b,
        eta_mean=-b * b,
        eta_var=eta_var,
        eta_abs3=eta_abs3,
        variance_sum=m2,
        cubic_sum=gamma,
        lyapunov_ratio=gamma / m**3,
        level=2.0 * y_n**2 * ledger.silt2 / ((n + 1.0) * m),
        degenerate=False,
    )
