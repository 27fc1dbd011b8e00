"""Monte Carlo estimators, exact oracles, and bound checkers."""

from .tails import (
    TailEstimate,
    quadratic_rate_constant,
    tail_mc,
    tail_mc_multi,
    w_samples,
    wilson_interval,
)
from .oracle import enumerated_tail, optimal_tilt, tilted_tail_estimate
from .green import GreenEstimate, green_function_mc, green_function_mc_multi
from .confinement import ConfinementResult, confinement_rate
from .checks import (
    BoundCheck,
    calibrate_heavy_mass_constant,
    calibrate_lattice_heavy_mass_rate,
    calibrate_silt_rate,
    heavy_mass_bound_check,
    lattice_heavy_mass_check,
    level_set_bound_check,
    max_bound_check,
    scenery_count_check,
    silt_bound_check,
)

__all__ = [
    "TailEstimate",
    "quadratic_rate_constant",
    "tail_mc",
    "tail_mc_multi",
    "w_samples",
    "wilson_interval",
    "enumerated_tail",
    "optimal_tilt",
    "tilted_tail_estimate",
    "GreenEstimate",
    "green_function_mc",
    "green_function_mc_multi",
    "ConfinementResult",
    "confinement_rate",
    "BoundCheck",
    "calibrate_heavy_mass_constant",
    "calibrate_lattice_heavy_mass_rate",
    "calibrate_silt_rate",
    "heavy_mass_bound_check",
    "lattice_heavy_mass_check",
    "level_set_bound_check",
    "max_bound_check",
    "scenery_count_check",
    "silt_bound_check",
]
