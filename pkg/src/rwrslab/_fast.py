"""Compiled per-replica walk kernels.

Each kernel consumes one uniform per step with the same decision rule as the
pure-Python steps in :mod:`rwrslab.walks`, so kernel output and
``build_ledger(run_walk(...))`` agree exactly on shared streams.  Vertex
identity is exact: trees remember (vertex, child) pairs, the lattice packs
coordinates into an open-addressed 64-bit key table.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_HASH_MULT = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def tree_counts(d, u):
    """Local-time profile and level sequence of a tree walk driven by u.

    Returns (counts, levels); counts[i] is the local time of the i-th
    discovered vertex, counts.sum() == len(u) + 1.
    """
    n = u.shape[0]
    cap = 1
    shift = 64
    while cap < 2 * (n + 2):
        cap *= 2
        shift -= 1
    mask = cap - 1
    hkey = np.full(cap, np.int64(-1), dtype=np.int64)
    hval = np.empty(cap, dtype=np.int64)
    parent = np.empty(n + 2, dtype=np.int64)
    counts = np.zeros(n + 2, dtype=np.int64)
    levels = np.empty(n + 1, dtype=np.int64)
    parent[0] = -1
    counts[0] = 1
    levels[0] = 0
    cur = np.int64(0)
    lev = 0
    nvert = np.int64(1)
    for k in range(n):
        if lev == 0:
            c = int(u[k] * d)
            forward = True
        else:
            m = int(u[k] * (d + 1))
            forward = m != 0
            c = m - 1
        if forward:
            key = cur * 32 + c
            idx = int((np.uint64(key) * _HASH_MULT) >> np.uint64(shift)) & mask
            while True:
                kk = hkey[idx]
                if kk == key:
                    cur = hval[idx]
                    break
                if kk == -1:
                    hkey[idx] = key
                    hval[idx] = nvert
                    parent[nvert] = cur
                    cur = nvert
                    nvert += 1
                    break
                idx = (idx + 1) & mask
            lev += 1
        else:
            cur = parent[cur]
            lev -= 1
        counts[cur] += 1
        levels[k + 1] = lev
    return counts[:nvert], levels


@njit(cache=True)
def tree_levels(d, u):
    """Level sequence only (no vertex identity); cheap path for level statistics."""
    n = u.shape[0]
    levels = np.empty(n + 1, dtype=np.int64)
    levels[0] = 0
    lev = 0
    for k in range(n):
        if lev == 0:
            lev = 1
        elif int(u[k] * (d + 1)) == 0:
            lev -= 1
        else:
            lev += 1
        levels[k + 1] = lev
    return levels


@njit(cache=True)
def lattice_counts(d, u, bits):
    """Local-time profile of a Z^d walk; coordinates packed into one int64 key."""
    n = u.shape[0]
    half = np.int64(1) << (bits - 1)
    cap = 1
    shift = 64
    while cap < 2 * (n + 2):
        cap *= 2
        shift -= 1
    mask = cap - 1
    hkey = np.full(cap, np.int64(-1), dtype=np.int64)
    hval = np.empty(cap, dtype=np.int64)
    counts = np.zeros(n + 2, dtype=np.int64)
    pos = np.zeros(d, dtype=np.int64)
    key = np.int64(0)
    for j in range(d):
        key = (key << bits) | half
    idx = int((np.uint64(key) * _HASH_MULT) >> np.uint64(shift)) & mask
    hkey[idx] = key
    hval[idx] = 0
    counts[0] = 1
    nvert = np.int64(1)
    for k in range(n):
        m = int(u[k] * (2 * d))
        ax = m >> 1
        if m & 1:
            pos[ax] -= 1
        else:
            pos[ax] += 1
        key = np.int64(0)
        for j in range(d):
            key = (key << bits) | (pos[j] + half)
        idx = int((np.uint64(key) * _HASH_MULT) >> np.uint64(shift)) & mask
        while True:
            kk = hkey[idx]
            if kk == key:
                counts[hval[idx]] += 1
                break
            if kk == -1:
                hkey[idx] = key
                hval[idx] = nvert
                counts[nvert] = 1
                nvert += 1
                break
            idx = (idx + 1) & mask
    return counts[:nvert]


@njit(cache=True)
def lattice_origin_visits(d, u, checkpoints):
    """Visits to the origin (time 0 included) at each horizon checkpoint."""
    out = np.empty(checkpoints.shape[0], dtype=np.int64)
    pos = np.zeros(d, dtype=np.int64)
    visits = np.int64(1)
    ci = 0
    for k in range(u.shape[0]):
        m = int(u[k] * (2 * d))
        ax = m >> 1
        if m & 1:
            pos[ax] -= 1
        else:
            pos[ax] += 1
        at_origin = True
        for j in range(d):
            if pos[j] != 0:
                at_origin = False
                break
        if at_origin:
            visits += 1
        while ci < checkpoints.shape[0] and k + 1 == checkpoints[ci]:
            out[ci] = visits
            ci += 1
    while ci < checkpoints.shape[0]:
        out[ci] = visits
        ci += 1
    return out
