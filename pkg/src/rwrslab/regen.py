"""Regeneration structure of the tree walk.

A regeneration happens at time n when the walk reaches a level it has never
attained before and the previous level is never attained again.  Detection is
necessarily offline (the condition quantifies over the future), so the
detector scans a complete level sequence and censors the trailing candidate
whose future is unobserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class RegenerationRecord:
    """Detected regeneration times, their epochs, and a censoring flag.

    ``epochs[k] = taus[k] - taus[k-1]`` (with taus[-1] = 0), so complete
    epochs sum to the last detected time.  ``censored`` marks that the last
    record-level candidate could not be confirmed before the run ended.
    """

    taus: np.ndarray
    epochs: np.ndarray
    censored: bool


def detect_regenerations(levels) -> RegenerationRecord:
    """Extract regeneration times from a tree walk's level sequence.

    A time n qualifies when levels[n] exceeds every earlier level and
    min(levels[n:]) > levels[n-1], i.e. the previous level is never attained
    again within the observed window.  A candidate at the final index has no
    observed future and is excluded; ``censored`` is set whenever the last
    record-level time did not make it into ``taus``, marking the trailing
    epoch as incomplete.
    """
    lv = np.asarray(levels, dtype=np.int64)
    if lv.ndim != 1 or lv.shape[0] < 2:
        raise ValueError("need a level sequence of length >= 2")
    last = lv.shape[0] - 1
    running_max = np.maximum.accumulate(lv)
    record = np.zeros(lv.shape[0], dtype=bool)
    record[1:] = lv[1:] > running_max[:-1]
    suffix_min = np.minimum.accumulate(lv[::-1])[::-1]
    never_back = np.zeros(lv.shape[0], dtype=bool)
    never_back[1:] = suffix_min[1:] > lv[:-1]
    candidates = np.flatnonzero(record & never_back)
    if candidates.size and candidates[-1] == last:
        candidates = candidates[:-1]
    taus = candidates
    record_times = np.flatnonzero(record)
    censored = bool(
        record_times.size and (taus.size == 0 or record_times[-1] != taus[-1])
    )
    epochs = np.diff(taus, prepend=0)
    return RegenerationRecord(taus=taus, epochs=epochs, censored=censored)


def epoch_rate_bound(d: int) -> float:
    """Closed-form lower bound on the exponential-moment rate of epochs:
    (1/3) log((d+1)/3) + 1/3 - 1/(d+1).

    Vacuous (zero) at d = 2; increases to infinity with d.
    """
    if d < 2:
        raise ValueError("branching d must be >= 2")
    return math.log((d + 1) / 3.0) / 3.0 + 1.0 / 3.0 - 1.0 / (d + 1)


def threshold_rate(d: int) -> float:
    """Half the epoch rate bound; the operative rate in heavy-local-time
    thresholds (4/rate) log n and the heavy-mass tail bound.

    Zero at d = 2, so rate-dependent thresholds require d >= 3.
    """
    return epoch_rate_bound(d) / 2.0


def escape_probability(d: int) -> float:
    """Probability the walk never returns to the root: (d-1)/d.

    From the root the first step is always forward; the level chain then
    returns to the root with the gambler's-ruin probability 1/d.
    """
    if d < 2:
        raise ValueError("branching d must be >= 2")
    return (d - 1) / d


def empirical_epoch_mgf(epochs, lam: float) -> float:
    """Sample mean of exp(lam * epoch) over complete epochs."""
    if lam < 0:
        raise ValueError("rate lam must be >= 0")
    ep = np.asarray(epochs, dtype=np.float64)
    if ep.size == 0:
        raise ValueError("empty epoch sample")
    return float(np.mean(np.exp(lam * ep)))


def epoch_histogram(epochs) -> list:
    """(k, count) rows of the epoch length histogram, ready for CSV export."""
    ep = np.asarray(epochs, dtype=np.int64)
    if ep.size == 0:
        return []
    ks, counts = np.unique(ep, return_counts=True)
    return [(int(k), int(c)) for k, c in zip(ks, counts)]
