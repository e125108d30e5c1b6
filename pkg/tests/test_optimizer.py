import math
import warnings

import numpy as np
import pytest

from cache3d.errors import DomainError, NoViableConfiguration
from cache3d.models import ModelParams, evaluate_arrays
from cache3d.optimizer import (
    SENTINEL_FACTOR,
    ConstraintSet,
    OptVector,
    constraint_gradients,
    gradient_sizes,
    optimize,
    optimize_depth,
    partition_assignments,
    penalized_objective,
    penalty_gradient,
    sizes_to_u,
    stationarity,
    u_to_sizes,
)
from cache3d.oracle import GridSpec, grid_search

P = ModelParams()


def usage(x, params=P):
    ev = evaluate_arrays(x.depth, np.asarray(x.sizes), np.asarray(x.partitions), params)
    return {"area": float(ev.area), "power": float(ev.power), "m_s": float(ev.m_s), "delay": float(ev.delay)}


def test_partition_counts():
    assert len(partition_assignments(1, 16)) == 16
    assert len(partition_assignments(2, 16)) == 120
    assert len(partition_assignments(3, 16)) == 560
    assert partition_assignments(3, 16).sum(axis=1).max() == 16


def test_coordinate_round_trip():
    s = np.array([1.5, 8.0, 300.0])
    back, dist = u_to_sizes(sizes_to_u(s))
    assert np.allclose(back, s, rtol=1e-12)
    assert dist == 0


def test_penalty_zero_inside_feasible_region():
    x = OptVector((4.0, 64.0), (12, 2))
    u = usage(x)
    cons = ConstraintSet(a_max=2 * u["area"], p_max=2 * u["power"], m_s_max=2 * u["m_s"])
    assert penalized_objective(x, P, cons, 1e4) == u["delay"]


def test_penalty_is_quadratic_in_relative_excess():
    x = OptVector((4.0, 64.0), (12, 2))
    u = usage(x)
    delta = 0.01
    cons = ConstraintSet(a_max=u["area"] / (1 + delta))
    w = 100.0
    got = penalized_objective(x, P, cons, w)
    assert got == pytest.approx(u["delay"] + w * P.tech.tau * delta**2, rel=1e-12)


def test_saturated_point_gets_sentinel():
    x = OptVector((0.01, 1.0), (1, 1))
    assert penalized_objective(x, P, ConstraintSet(), 10.0) >= SENTINEL_FACTOR * P.tech.d_dram


def test_gradient_has_no_component_for_absent_levels():
    x = OptVector((4.0, 64.0), (12, 2))
    g = gradient_sizes(x, P, ConstraintSet(), 0.0)
    assert g.shape == (2,)


def test_gradient_warns_near_ordering_boundary():
    x = OptVector((4.0, 4.0 * (1 + 1e-9)), (12, 2))
    with pytest.warns(RuntimeWarning, match="one-sided"):
        gradient_sizes(x, P, ConstraintSet(), 0.0)


@pytest.mark.parametrize("name", ["area", "power", "m_s"])
def test_penalty_gradient_at_boundary_plus_delta(name):
    x = OptVector((3.0, 40.0, 900.0), (10, 5, 1))
    u = usage(x)
    delta = 1e-3
    limit = u[name] / (1 + delta)
    cons = ConstraintSet(**{{"area": "a_max", "power": "p_max", "m_s": "m_s_max"}[name]: limit})
    w = 1e3
    analytic = penalty_gradient(x, P, cons, w)
    dg = constraint_gradients(x, P, cons)[name]
    expected = 2 * w * P.tech.tau * delta / limit * dg
    assert np.allclose(analytic, expected, rtol=1e-12)
    fd = gradient_sizes(x, P, cons, w) - gradient_sizes(x, P, cons, 0.0)
    scale = np.abs(analytic).max()
    assert np.abs(fd - analytic).max() <= 1e-3 * scale


def test_depth_one_matches_dense_scan():
    res = optimize_depth(1, P, ConstraintSet())
    dense = grid_search(1, P, ConstraintSet(), GridSpec(size_points=2048, refinement_rounds=0))
    assert abs(res.delay - dense.delay) / dense.delay <= 0.005


def test_depth_three_empty_feasible_set():
    # S_1 >= sigma and strict ordering put three levels above 3 * alpha = 0.75
    res = optimize_depth(3, P, ConstraintSet(a_max=0.6))
    assert not res.feasible
    assert res.x is not None and res.violation > 0


def test_binding_area_residual_small():
    cons = ConstraintSet(a_max=2.0)
    res = optimize_depth(2, P, cons)
    assert res.feasible
    u = usage(res.x)
    assert abs(u["area"] - 2.0) / 2.0 <= 1e-4


def test_unconstrained_winner_is_three_levels(unconstrained_result):
    assert unconstrained_result.winner_depth == 3
    assert unconstrained_result.binding == []


def test_interior_optimum_is_stationary(unconstrained_result):
    assert unconstrained_result.stationarity < 1e-3


def test_random_feasible_point_is_far_from_stationary(unconstrained_result):
    x_opt = unconstrained_result.winner
    cons = ConstraintSet()
    r_opt = stationarity(x_opt, P, cons)[0]
    rng = np.random.default_rng(5)
    for _ in range(5):
        sizes = np.array(x_opt.sizes) * np.exp(rng.uniform(-1, 1, 3))
        sizes = np.maximum.accumulate(sizes * [1, 1.01, 1.02])
        r = stationarity(OptVector(tuple(sizes), x_opt.partitions), P, cons)[0]
        assert r >= 10 * r_opt


def test_single_active_constraint_geometry():
    res = optimize(P, ConstraintSet(a_max=5.0))
    assert [b.name for b in res.binding] == ["area"]
    assert res.stationarity < 1e-3
    assert res.multipliers["area"] > 0


def test_tight_power_large_area_prefers_one_level():
    from cache3d.config import load_profile

    cfg = load_profile("tight_power")
    res = optimize(cfg.params, cfg.constraints.replace(a_max=1e4))
    assert res.winner_depth == 1


def test_no_viable_configuration_carries_diagnostics():
    with pytest.raises(NoViableConfiguration) as info:
        optimize(P, ConstraintSet(a_max=0.1))
    diag = info.value.diagnostics
    assert set(diag) == {1, 2, 3}
    assert all(not r.feasible and r.violation > 0 for r in diag.values())


def test_optimize_is_deterministic():
    cons = ConstraintSet(a_max=3.0, p_max=8.0)
    a = optimize(P, cons, seed=11).to_dict()
    b = optimize(P, cons, seed=11).to_dict()
    assert a == b


def test_thread_workers_do_not_change_result():
    cons = ConstraintSet(a_max=3.0)
    a = optimize_depth(2, P, cons, workers=1)
    b = optimize_depth(2, P, cons, workers=3)
    assert (a.x, a.delay) == (b.x, b.delay)


def test_bad_depth():
    with pytest.raises(DomainError):
        optimize_depth(4, P, ConstraintSet())
    with pytest.raises(DomainError):
        ConstraintSet(a_max=-1)
