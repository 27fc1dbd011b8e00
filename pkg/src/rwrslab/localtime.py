"""Incremental local-time ledger and derived local-time statistics.

The ledger counts all n+1 positions S_0..S_n of an n-step walk, so total
mass is n+1 after every step.  Aggregates (sum of squares, sum of cubes,
maximum, range size) are maintained exactly in Python integers; widths are
unbounded, so the identities stay exact for any walk length.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable

from .walks import VertexId, WalkTrace


class LocalTimeLedger:
    """Per-vertex visit counts with exact running aggregates.

    Single writer during construction; treat as read-only afterwards.
    ``n`` is the number of steps recorded so far, i.e. visits - 1.
    """

    __slots__ = ("counts", "n", "silt2", "silt3", "max_lt")

    def __init__(self) -> None:
        self.counts: Dict[VertexId, int] = {}
        self.n = -1
        self.silt2 = 0
        self.silt3 = 0
        self.max_lt = 0

    @property
    def range_size(self) -> int:
        """Number of distinct visited vertices."""
        return len(self.counts)

    @property
    def mass(self) -> int:
        """Total local time; equals n + 1."""
        return self.n + 1

    def record_visit(self, v: VertexId) -> None:
        """Count one more visit to v, updating all aggregates in O(1)."""
        m = self.counts.get(v, 0)
        self.counts[v] = m + 1
        self.silt2 += 2 * m + 1
        self.silt3 += 3 * m * m + 3 * m + 1
        if m + 1 > self.max_lt:
            self.max_lt = m + 1
        self.n += 1

    def summary(self) -> dict:
        return {
            "n": self.n,
            "range": self.range_size,
            "silt2": self.silt2,
            "silt3": self.silt3,
            "max_lt": self.max_lt,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary())

    def __repr__(self) -> str:
        return f"LocalTimeLedger(n={self.n}, range={self.range_size})"


def build_ledger(trace: WalkTrace) -> LocalTimeLedger:
    """Ledger over all n+1 positions of a walk trace."""
    ledger = LocalTimeLedger()
    for v in trace.vertices:
        ledger.record_visit(v)
    return ledger


def ledger_from_counts(counts: Iterable[int]) -> LocalTimeLedger:
    """Ledger with anonymous integer-labelled vertices holding given counts.

    Used to lift kernel count profiles into the exact-aggregate API.
    """
    ledger = LocalTimeLedger()
    for i, c in enumerate(counts):
        c = int(c)
        if c < 1:
            raise ValueError("local times must be positive")
        ledger.counts[i] = c
        ledger.silt2 += c * c
        ledger.silt3 += c * c * c
        if c > ledger.max_lt:
            ledger.max_lt = c
        ledger.n += c
    return ledger


def level_set_size(ledger: LocalTimeLedger, t: float) -> int:
    """|{v : local time > t}| (strict inequality)."""
    if t < 0:
        raise ValueError("threshold must be >= 0")
    if t >= ledger.max_lt:
        return 0
    return sum(1 for c in ledger.counts.values() if c > t)


def heavy_mass(ledger: LocalTimeLedger, threshold: float) -> int:
    """Total local time carried by vertices with local time >= threshold."""
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    if threshold > ledger.max_lt:
        return 0
    return sum(c for c in ledger.counts.values() if c >= threshold)


def silt(ledger: LocalTimeLedger, q: int) -> int:
    """Self-intersection local time sum_v l(v)^q, for q in {2, 3}."""
    if q == 2:
        return ledger.silt2
    if q == 3:
        return ledger.silt3
    raise ValueError("only q = 2 and q = 3 are supported")


def max_local_time(ledger: LocalTimeLedger) -> int:
    return ledger.max_lt
