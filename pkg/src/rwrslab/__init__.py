"""rwrslab: a Monte Carlo laboratory for random walks in random scenery.

Walk engines on Z^d and the d-ary tree, exact local-time ledgers,
regeneration detection, scenery distributions with declared moment
profiles, self-normalized statistics with their decompositions, and the
estimation / bound-checking machinery built on top of them.
"""

from .walks import GraphSpec, TreeVertex, WalkTrace, run_walk, step_lattice, step_tree
from .localtime import (
    LocalTimeLedger,
    build_ledger,
    heavy_mass,
    ledger_from_counts,
    level_set_size,
    max_local_time,
    silt,
)
from .regen import (
    RegenerationRecord,
    detect_regenerations,
    empirical_epoch_mgf,
    epoch_rate_bound,
    escape_probability,
    threshold_rate,
)
from .scenery import (
    SceneryAssignment,
    SceneryDistribution,
    gaussian,
    rademacher,
    sample_assignment,
    symmetric_pareto,
    symmetric_pareto_sample,
    uniform_centered,
)
from .rwrs import (
    Decomposition,
    NagaevQuantities,
    RwrsSummary,
    compute_summary,
    decompose_lattice,
    decompose_tree,
    nagaev_quantities,
    w_statistic,
)

__version__ = "0.1.0"
