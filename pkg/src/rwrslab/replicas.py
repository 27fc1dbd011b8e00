"""Replica fan-out: per-replica profiles and degree-independent parallel maps.

Replica r always draws from the stream keyed by (seed, r), and chunk
boundaries are fixed, so results do not depend on the parallelism degree.
Partial results are merged in chunk-index order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from . import _fast
from .rng import replica_stream
from .walks import TREE, GraphSpec

CHUNK = 4096

_MAX_TREE_D = 30


def local_time_profile(graph: GraphSpec, n: int, seed: int, replica: int = 0):
    """Local-time counts of one replica walk, in vertex-discovery order.

    Returns (counts, levels, gen); ``levels`` is None on the lattice and
    ``gen`` is the replica's generator positioned right after the walk
    draws, so callers can continue with scenery draws deterministically.
    """
    if n < 1:
        raise ValueError("walk length n must be >= 1")
    gen = replica_stream(seed, replica)
    u = gen.random(n)
    if graph.kind == TREE:
        if graph.d > _MAX_TREE_D:
            raise ValueError(f"tree kernel supports branching d <= {_MAX_TREE_D}")
        counts, levels = _fast.tree_counts(graph.d, u)
        return counts, levels, gen
    bits = 63 // graph.d
    if n >= (1 << (bits - 1)):
        counts = _python_lattice_counts(graph.d, u)
        return counts, None, gen
    counts = _fast.lattice_counts(graph.d, u, bits)
    return counts, None, gen


def _python_lattice_counts(d: int, u: np.ndarray) -> np.ndarray:
    # exact fallback when coordinates cannot be packed into 64 bits
    counts: dict = {}
    pos = (0,) * d
    counts[pos] = 1
    order = [pos]
    for uu in u:
        m = int(uu * (2 * d))
        ax, sign = m >> 1, 1 - 2 * (m & 1)
        pos = pos[:ax] + (pos[ax] + sign,) + pos[ax + 1 :]
        if pos in counts:
            counts[pos] += 1
        else:
            counts[pos] = 1
            order.append(pos)
    return np.array([counts[v] for v in order], dtype=np.int64)


def level_sequence(graph: GraphSpec, n: int, seed: int, replica: int = 0) -> np.ndarray:
    """Level sequence of one tree replica (cheap path, no vertex identity)."""
    if graph.kind != TREE:
        raise ValueError("level sequences are defined for tree walks")
    gen = replica_stream(seed, replica)
    return _fast.tree_levels(graph.d, gen.random(n))


def default_parallelism() -> int:
    return os.cpu_count() or 1


def _chunk_ranges(replicas: int, chunk: int):
    for lo in range(0, replicas, chunk):
        yield lo, min(lo + chunk, replicas)


def _run_chunk(task, lo: int, hi: int):
    return task.run_chunk(lo, hi)


def map_chunks(
    task,
    replicas: int,
    parallelism: Optional[int] = None,
    chunk: int = CHUNK,
) -> list:
    """Run ``task.run_chunk(lo, hi)`` over fixed replica chunks.

    Returns the per-chunk results in chunk-index order regardless of the
    execution order, so the merge is independent of the parallelism degree.
    """
    workers = parallelism if parallelism else default_parallelism()
    ranges = list(_chunk_ranges(replicas, chunk))
    if workers <= 1 or len(ranges) <= 1:
        return [task.run_chunk(lo, hi) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, task, lo, hi) for lo, hi in ranges]
        return [f.result() for f in futures]


def gather_array(
    task, replicas: int, parallelism: Optional[int] = None, chunk: int = CHUNK
) -> np.ndarray:
    """Concatenate per-chunk arrays in chunk order."""
    return np.concatenate(map_chunks(task, replicas, parallelism, chunk))


def compensated_total(parts) -> float:
    """Order-insensitive compensated sum of per-chunk scalar partials."""
    return math.fsum(parts)
