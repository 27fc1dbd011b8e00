"""Counter-based, splittable random streams.

Every source of randomness in the package is derived from a 64-bit master
seed through stateless mixing:

* replica streams -- Philox generators keyed by ``(seed, replica)``, so the
  replica fan-out is reproducible and independent of chunking or worker
  count;
* per-vertex draws -- a keyed splitmix64 hash of ``(seed, vertex key)``,
  giving scenery values that do not depend on the order vertices were
  discovered in.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# domain separators so walk uniforms, scenery draws etc. never collide
DOMAIN_REPLICA = 0x77F3A1C5D2B90E64
DOMAIN_SCENERY = 0x3C69B1E85FAD0727


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def fold(seed: int, *words: int) -> int:
    """Mix a seed with a sequence of integer words into one 64-bit value."""
    h = mix64(seed & MASK64)
    for w in words:
        h = mix64(h ^ (w & MASK64))
    return h


def replica_stream(seed: int, replica: int = 0) -> np.random.Generator:
    """Philox generator for one replica, keyed by (seed, replica)."""
    k0 = fold(seed, DOMAIN_REPLICA, replica)
    k1 = mix64(k0 ^ _GOLDEN)
    key = np.array([k0, k1], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorised splitmix64 finalizer over a uint64 array."""
    with np.errstate(over="ignore"):
        x = x + np.uint64(_GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def keyed_uniforms(seed: int, keys: np.ndarray) -> np.ndarray:
    """One uniform in [2^-53, 1) per 64-bit key, deterministic in (seed, key)."""
    base = np.uint64(fold(seed, DOMAIN_SCENERY))
    h = mix64_array(np.asarray(keys, dtype=np.uint64) ^ base)
    # top 53 bits -> (0,1); +1 keeps 0 out of the range so inverse CDFs stay finite
    return ((h >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53


def zigzag(x: int) -> int:
    """Map signed integers to non-negative ones (0,-1,1,-2,... -> 0,1,2,3,...)."""
    return (x << 1) if x >= 0 else ((-x << 1) - 1)
