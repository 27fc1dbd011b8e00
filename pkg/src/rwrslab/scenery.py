"""Scenery distributions: centered i.i.d. vertex labels with declared moments.

Four kinds are supported -- gaussian(sigma), rademacher, symmetric_pareto(alpha)
with density alpha/2 * (1+|t|)^(-1-alpha), and uniform_centered(a) on [-a, a].
All are symmetric about zero.  A distribution declares which absolute moments
are finite (symmetric_pareto(alpha) has E|xi|^m < infinity iff m < alpha), and
experiments validate their moment preconditions against that profile before
running.

Sampling is a pure transform of uniforms, so values are reproducible; the
per-vertex assignment keys each draw by (seed, vertex), making scenery
independent of the walk and of vertex-discovery order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.special import ndtri

from .rng import keyed_uniforms
from .walks import VertexId, vertex_key

GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"
SYMMETRIC_PARETO = "symmetric_pareto"
UNIFORM_CENTERED = "uniform_centered"

_SUPERSCRIPT = {2: "²", 3: "³", 4: "⁴", 5: "⁵", 6: "⁶"}


class MomentError(ValueError):
    """A required scenery moment is infinite."""


def moment_label(m: int, absolute: bool = False) -> str:
    sup = _SUPERSCRIPT.get(m, f"^{m}")
    return f"E|ξ|{sup} < ∞" if absolute else f"Eξ{sup} < ∞"


@dataclass(frozen=True)
class SceneryDistribution:
    """One scenery law.  ``param`` is sigma / alpha / half-width per kind;
    ``scale`` multiplies every draw (used by the standardizing wrapper)."""

    kind: str
    param: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (GAUSSIAN, RADEMACHER, SYMMETRIC_PARETO, UNIFORM_CENTERED):
            raise ValueError(f"unknown scenery kind {self.kind!r}")
        if self.param <= 0 or self.scale <= 0:
            raise ValueError("scenery parameters must be positive")

    # -- moment profile ----------------------------------------------------

    @property
    def max_abs_moment(self) -> float:
        """sup{m : E|xi|^m < infinity} (inf for all kinds but the pareto)."""
        return self.param if self.kind == SYMMETRIC_PARETO else math.inf

    def has_moment(self, m: int) -> bool:
        return m < self.max_abs_moment

    def abs_moment(self, m: int) -> float:
        """E|xi|^m, closed form; raises MomentError when infinite."""
        if m < 0:
            raise ValueError("moment order must be >= 0")
        if not self.has_moment(m):
            raise MomentError(
                f"{self.kind}({self.param:g}) violates {moment_label(m, absolute=True)}"
            )
        s = self.scale**m
        if self.kind == GAUSSIAN:
            sig = self.param
            return s * sig**m * 2 ** (m / 2) * math.gamma((m + 1) / 2) / math.sqrt(math.pi)
        if self.kind == RADEMACHER:
            return s
        if self.kind == SYMMETRIC_PARETO:
            alpha = self.param
            out = float(math.factorial(m))
            for j in range(1, m + 1):
                out /= alpha - j
            return s * out
        half = self.param
        return s * half**m / (m + 1)

    def moment(self, m: int) -> float:
        """E xi^m; zero for odd m by symmetry."""
        if m % 2 == 1:
            if not self.has_moment(m):
                raise MomentError(
                    f"{self.kind}({self.param:g}) violates {moment_label(m)}"
                )
            return 0.0
        return self.abs_moment(m)

    def moments(self) -> dict:
        """The moment set used by the deviation machinery."""
        return {
            "ex2": self.moment(2),
            "ex3": self.moment(3),
            "ex4": self.moment(4),
            "eabs3": self.abs_moment(3),
        }

    @property
    def variance(self) -> float:
        return self.moment(2)

    def standardized(self) -> "SceneryDistribution":
        """Rescaled copy with E xi^2 = 1."""
        return replace(self, scale=self.scale / math.sqrt(self.variance))

    # -- sampling ----------------------------------------------------------

    def sample_from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Inverse-CDF transform of uniforms in [0, 1) to scenery values."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == GAUSSIAN:
            uu = np.clip(u, 2.0**-54, 1.0 - 2.0**-53)
            return (self.param * self.scale) * ndtri(uu)
        if self.kind == RADEMACHER:
            return np.where(u < 0.5, self.scale, -self.scale)
        if self.kind == SYMMETRIC_PARETO:
            sign = np.where(u < 0.5, 1.0, -1.0)
            frac = 2.0 * u - np.floor(2.0 * u)
            tail = 1.0 - frac  # in (0, 1]
            return self.scale * sign * (tail ** (-1.0 / self.param) - 1.0)
        return (self.param * self.scale) * (2.0 * u - 1.0)

    def sample(self, size: int, gen: np.random.Generator) -> np.ndarray:
        return self.sample_from_uniform(gen.random(size))

    def survival_abs(self, t: float) -> float:
        """P(|xi| >= t)."""
        if t <= 0:
            return 1.0
        t = t / self.scale
        if self.kind == GAUSSIAN:
            return float(math.erfc(t / (self.param * math.sqrt(2))))
        if self.kind == RADEMACHER:
            return 1.0 if t <= 1.0 else 0.0
        if self.kind == SYMMETRIC_PARETO:
            return (1.0 + t) ** -self.param
        return max(0.0, min(1.0, 1.0 - t / self.param))

    def density(self, t: np.ndarray) -> np.ndarray:
        """Probability density (continuous kinds only)."""
        t = np.asarray(t, dtype=np.float64) / self.scale
        if self.kind == GAUSSIAN:
            sig = self.param
            out = np.exp(-0.5 * (t / sig) ** 2) / (sig * math.sqrt(2 * math.pi))
        elif self.kind == SYMMETRIC_PARETO:
            a = self.param
            out = 0.5 * a * (1.0 + np.abs(t)) ** (-1.0 - a)
        elif self.kind == UNIFORM_CENTERED:
            out = np.where(np.abs(t) <= self.param, 1.0 / (2 * self.param), 0.0)
        else:
            raise ValueError("rademacher has no density; use finite_support()")
        return out / self.scale

    def finite_support(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """(values, probabilities) for finite-support kinds, else None."""
        if self.kind == RADEMACHER:
            return (
                np.array([self.scale, -self.scale]),
                np.array([0.5, 0.5]),
            )
        return None

    # -- exponential tilting (finite-MGF kinds) -----------------------------

    def log_mgf(self, t: float) -> float:
        """log E exp(t xi); defined everywhere for gaussian and rademacher."""
        ts = t * self.scale
        if self.kind == GAUSSIAN:
            return 0.5 * (ts * self.param) ** 2
        if self.kind == RADEMACHER:
            a = abs(ts)
            return a + math.log1p(math.exp(-2 * a)) - math.log(2.0)
        raise ValueError(f"tilting unsupported for kind {self.kind!r}")

    def log_mgf_derivative(self, t: float) -> float:
        """d/dt log E exp(t xi)."""
        ts = t * self.scale
        if self.kind == GAUSSIAN:
            return self.scale * ts * self.param**2
        if self.kind == RADEMACHER:
            return self.scale * math.tanh(ts)
        raise ValueError(f"tilting unsupported for kind {self.kind!r}")

    def sample_tilted_from_uniform(self, u: np.ndarray, t: float) -> np.ndarray:
        """Draw from the t-tilted law; t = 0 reproduces sample_from_uniform
        bit for bit on the same uniforms."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == GAUSSIAN:
            sig = self.param * self.scale
            uu = np.clip(u, 2.0**-54, 1.0 - 2.0**-53)
            return sig * ndtri(uu) + t * sig**2
        if self.kind == RADEMACHER:
            ts = t * self.scale
            p_plus = 1.0 / (1.0 + math.exp(-2.0 * ts))
            return np.where(u < p_plus, self.scale, -self.scale)
        raise ValueError(f"tilting unsupported for kind {self.kind!r}")

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        name = {
            GAUSSIAN: "sigma",
            RADEMACHER: "value",
            SYMMETRIC_PARETO: "alpha",
            UNIFORM_CENTERED: "half_width",
        }[self.kind]
        params = {name: self.param}
        if self.scale != 1.0:
            params["scale"] = self.scale
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_json(cls, obj) -> "SceneryDistribution":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj["kind"]
        params = dict(obj.get("params", {}))
        scale = float(params.pop("scale", 1.0))
        param = float(next(iter(params.values()))) if params else 1.0
        return cls(kind=kind, param=param, scale=scale)


def gaussian(sigma: float = 1.0) -> SceneryDistribution:
    return SceneryDistribution(GAUSSIAN, sigma)


def rademacher() -> SceneryDistribution:
    return SceneryDistribution(RADEMACHER, 1.0)


def symmetric_pareto(alpha: float) -> SceneryDistribution:
    return SceneryDistribution(SYMMETRIC_PARETO, alpha)


def uniform_centered(a: float) -> SceneryDistribution:
    return SceneryDistribution(UNIFORM_CENTERED, a)


def symmetric_pareto_sample(alpha: float, u: float, sign: int) -> float:
    """sign * (u^(-1/alpha) - 1): inverse CDF of |xi| for the pareto kind,
    where |xi| has CDF 1 - (1+t)^(-alpha)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie in (0, 1)")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return sign * (u ** (-1.0 / alpha) - 1.0)


@dataclass
class SceneryAssignment:
    """Scenery values over a fixed vertex set, keyed per vertex."""

    values: Dict[VertexId, float]
    distribution: SceneryDistribution
    seed: int

    def __getitem__(self, v: VertexId) -> float:
        return self.values[v]

    def negated(self) -> "SceneryAssignment":
        return SceneryAssignment(
            values={v: -x for v, x in self.values.items()},
            distribution=self.distribution,
            seed=self.seed,
        )

    def scaled(self, c: float) -> "SceneryAssignment":
        return SceneryAssignment(
            values={v: c * x for v, x in self.values.items()},
            distribution=self.distribution,
            seed=self.seed,
        )


def sample_assignment(
    dist: SceneryDistribution, vertices: Iterable[VertexId], seed: int
) -> SceneryAssignment:
    """One i.i.d. draw per vertex, independent of the walk.

    Each value depends only on (dist, seed, vertex), never on iteration
    order, so assignments agree across runs that visit the same vertices.
    """
    vs = list(vertices)
    keys = np.fromiter((vertex_key(v) for v in vs), dtype=np.uint64, count=len(vs))
    xs = dist.sample_from_uniform(keyed_uniforms(seed, keys))
    return SceneryAssignment(
        values=dict(zip(vs, xs.tolist())), distribution=dist, seed=seed
    )


def eta_abs_central_moment(
    dist: SceneryDistribution, b: float, power: int = 3
) -> float:
    """E|eta - E eta|^power for eta = 2 b xi - b^2 xi^2.

    Exact for finite-support kinds; adaptive quadrature against the density
    (relative accuracy ~1e-6 or better) otherwise.  Requires E xi^(2*power)
    finite.
    """
    if not dist.has_moment(2 * power):
        raise MomentError(
            f"{dist.kind}({dist.param:g}) violates {moment_label(2 * power, absolute=True)}"
        )
    if b == 0.0:
        return 0.0
    mean_eta = -b * b * dist.moment(2)
    support = dist.finite_support()
    if support is not None:
        vals, probs = support
        eta = 2 * b * vals - b * b * vals * vals
        return float(np.sum(probs * np.abs(eta - mean_eta) ** power))

    def integrand(t):
        eta = 2 * b * t - b * b * t * t
        return np.abs(eta - mean_eta) ** power * dist.density(t)

    # eta(t) - mean crosses zero at (1 +- sqrt(1 - mean/ (b... )))/b; split there
    disc = math.sqrt(max(0.0, 1.0 - mean_eta))
    roots = sorted(((1.0 - disc) / b, (1.0 + disc) / b))
    pieces = [(-math.inf, roots[0]), (roots[0], roots[1]), (roots[1], math.inf)]
    total = 0.0
    for lo, hi in pieces:
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-9, limit=400)
        total += val
    return total


def require_moment(dist: SceneryDistribution, m: int, absolute: bool = True) -> None:
    """Raise MomentError naming the violated precondition when E|xi|^m = inf."""
    if not dist.has_moment(m):
        raise MomentError(
            f"{dist.kind}({dist.param:g}) violates precondition {moment_label(m, absolute=False)}"
        )
