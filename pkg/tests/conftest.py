import numpy as np
import pytest

from rwrslab.localtime import build_ledger
from rwrslab.walks import GraphSpec, run_walk


def random_instances(count, seed, graphs=("tree", "lattice"), n_range=(20, 400)):
    """Seeded stream of (trace, ledger) pairs over small random walks."""
    rng = np.random.default_rng(seed)
    for i in range(count):
        kind = graphs[i % len(graphs)]
        d = int(rng.integers(3, 6)) if kind == "lattice" else int(rng.integers(2, 9))
        n = int(rng.integers(*n_range))
        trace = run_walk(GraphSpec(kind, d), n, seed=int(rng.integers(2**62)))
        yield trace, build_ledger(trace)


@pytest.fixture
def small_instances():
    return list(random_instances(40, seed=20260810))
