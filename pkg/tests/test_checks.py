import math

import pytest

from rwrslab.estimators.checks import (
    calibrate_lattice_heavy_mass_rate,
    calibrate_silt_rate,
    heavy_mass_bound_check,
    heavy_mass_rhs,
    lattice_heavy_mass_check,
    lattice_heavy_mass_rhs,
    level_set_bound_check,
    level_set_rhs,
    max_bound_check,
    max_rhs,
    scenery_count_check,
    scenery_count_rhs,
    silt_bound_check,
    silt_rhs,
)
from rwrslab.scenery import MomentError, gaussian, symmetric_pareto
from rwrslab.walks import GraphSpec


def test_level_set_rhs_golden():
    # exp(1000 e^-5 - 100), cross-checked at 40 digits
    val = level_set_rhs(1000, 40.0, 10.0, 0.25)
    assert val == 3.1390989867287136e-41
    assert val == pytest.approx(3.1390989867287173e-41, rel=1e-13)
    # pure function of its parameters
    assert level_set_rhs(1000, 40.0, 10.0, 0.25) == val


def test_level_set_validations():
    with pytest.raises(ValueError):
        level_set_bound_check(2, 100, 5, 2, 0.01, 1000, seed=1)  # rate 0 at d=2
    with pytest.raises(ValueError):
        level_set_bound_check(8, 100, 5, 2, 0.5, 1000, seed=1)  # beta too big
    with pytest.raises(ValueError):
        level_set_bound_check(8, 100, 0.5, 2, 0.1, 1000, seed=1)  # t < 1


def test_level_set_impossible_event():
    # t u > n + 1 makes the event impossible: zero hits, bound holds
    bc = level_set_bound_check(8, 50, 30.0, 3.0, 0.14, 500, seed=2)
    assert bc.p_hat == 0.0 and bc.ci_low == 0.0
    assert bc.holds


def test_heavy_mass_rhs_golden_and_check():
    assert heavy_mass_rhs(8, 4.0, 1.0) == 0.5552003061066156
    bc = heavy_mass_bound_check(8, 1000, 2.0, 2000, seed=3, m_const=1.0)
    assert bc.holds
    assert bc.params["threshold"] == pytest.approx(
        4.0 / 0.2942131592224627 * math.log(1000.0), rel=1e-12
    )
    with pytest.raises(ValueError):
        heavy_mass_bound_check(2, 1000, 2.0, 1000, seed=3, m_const=1.0)


def test_max_rhs_golden_values():
    tree2 = GraphSpec("tree", 2)
    assert max_rhs(tree2, 10_000, 40.0) == 0.0013565659025725006
    # c1 = -log(1 - (d/(d+1)) p_o) = log(3/2) at d = 2
    assert max_rhs(tree2, 1, 2.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert max_rhs(GraphSpec("lattice", 3), 100, 5.0, escape_prob=0.6595) == pytest.approx(
        100 * (1 - 0.6595) ** 4, rel=1e-12
    )
    with pytest.raises(ValueError):
        max_rhs(GraphSpec("lattice", 3), 100, 5.0)  # escape probability required


def test_max_bound_check_trivial_and_mc():
    tree2 = GraphSpec("tree", 2)
    bc1 = max_bound_check(tree2, 200, 1.0, 500, seed=4)
    assert bc1.rhs == 200.0 and bc1.p_hat == 1.0 and bc1.holds
    bc40 = max_bound_check(tree2, 10_000, 40.0, 5000, seed=5)
    assert bc40.holds
    with pytest.raises(ValueError):
        max_bound_check(tree2, 100, 0.5, 100, seed=4)


def test_silt_rhs_golden_and_calibrated_pipeline():
    assert silt_rhs(1000, 2, 0.25) == 0.00036863846995395413
    g3 = GraphSpec("tree", 3)
    c2 = calibrate_silt_rate(g3, 500, 2, 2.5, 10_000, seed=6)
    assert c2 > 0
    bc = silt_bound_check(g3, 1000, 2, 2.5, 10_000, seed=7, c_q=c2)
    assert bc.holds
    assert 0 < bc.details["mean_stat_over_n"] < 3.0
    with pytest.raises(ValueError):
        silt_bound_check(g3, 1000, 4, 2.5, 1000, seed=7, c_q=0.1)
    with pytest.raises(ValueError):
        calibrate_silt_rate(g3, 500, 2, 50.0, 1000, seed=6)  # no events that far out


def test_lattice_heavy_mass_rhs_golden_and_check():
    assert lattice_heavy_mass_rhs(3, 10_000, 3.0, 0.05) == 0.6349699054440759
    c1 = calibrate_lattice_heavy_mass_rate(3, 5000, 2.5, 1500, seed=8)
    assert c1 > 0
    bc = lattice_heavy_mass_check(3, 2000, 2.5, 1500, seed=9, c1=c1)
    assert bc.holds
    assert isinstance(bc.details["mean_shell_occupancy"], dict)
    bc2 = lattice_heavy_mass_check(3, 10_000, 3.0, 1500, seed=10, c1=c1)
    assert bc2.holds
    with pytest.raises(ValueError):
        lattice_heavy_mass_check(2, 1000, 2.0, 1000, seed=8, c1=0.1)


def test_scenery_count_rhs_goldens():
    assert scenery_count_rhs(symmetric_pareto(5.0), 10_000, 3.0, 4, 5.0) == 6.16701043562181e26
    assert scenery_count_rhs(symmetric_pareto(5.0), 10_000, 3.0, 4, 5.0) == pytest.approx(
        6.1670104356217835e26, rel=1e-13  # 40-digit cross-check
    )
    assert scenery_count_rhs(gaussian(1.0), 10_000, 3.0, 4, 5.0) == 1.4985835358561035e29
    with pytest.raises(MomentError):
        scenery_count_rhs(symmetric_pareto(3.0), 10_000, 3.0, 4, 5.0)
    with pytest.raises(ValueError):
        scenery_count_rhs(gaussian(), 100, 1.0, 4, 0.0)


def test_scenery_count_check_trivial_and_zero_tail():
    # RHS > 1: holds no matter what the count distribution does
    bc = scenery_count_check(symmetric_pareto(5.0), 2000, 3.0, 4, 5.0, 300, seed=11)
    assert bc.rhs > 1.0
    assert bc.holds
    # far beyond the count's reach: LHS hits zero and the bound still holds
    bc0 = scenery_count_check(symmetric_pareto(5.0), 2000, 3.0, 4, 1800.0, 300, seed=12)
    assert bc0.p_hat == 0.0
    assert bc0.holds


def test_bound_check_rhs_is_deterministic():
    args = (1234, 17.0, 3.0, 0.11)
    assert level_set_rhs(*args) == level_set_rhs(*args)
    assert max_rhs(GraphSpec("tree", 5), 777, 9.0) == max_rhs(GraphSpec("tree", 5), 777, 9.0)
    assert scenery_count_rhs(gaussian(2.0), 500, 2.0, 4, 3.0) == scenery_count_rhs(
        gaussian(2.0), 500, 2.0, 4, 3.0
    )
