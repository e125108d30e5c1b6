"""Acceptance gate.

Each test carries a ``criterion`` mark; the terminal summary prints one
PASS/FAIL line per criterion.  Tolerances and time limits are the gate's,
not tuned to the implementation.
"""
import math
import time

import numpy as np
import pytest

from cache3d.config import PROFILES, load_profile
from cache3d.fitting import DEFAULT_SIZES, fit_area, fit_beta_per_layers, generate_synthetic_samples
from cache3d.models import HierarchyConfig, ModelParams, evaluate_arrays, miss_rate_arrays, total_power
from cache3d.optimizer import ConstraintSet, OptVector, gradient_sizes, optimize, penalty_gradient
from cache3d.oracle import INSTANCE_SEEDS, GridSpec, random_instances, run_comparison
from cache3d.sweep import run_sweep

P = ModelParams()
# three zoom rounds bring the oracle within ~0.1 % of the continuous optimum
ORACLE_GRID = GridSpec(size_points=48, refinement_rounds=3)


def detail(request, text):
    request.node.user_properties.append(("detail", text))


def profile_sweep(name):
    cfg = load_profile(name)
    t0 = time.perf_counter()
    rows = run_sweep(cfg.sweep.budgets(), cfg.params, cfg.constraints, seed=cfg.seed)
    return cfg, rows, time.perf_counter() - t0


@pytest.fixture(scope="module")
def default_sweep():
    return profile_sweep("default")


# -- 1 ----------------------------------------------------------------------------

@pytest.mark.criterion(1, "fit quality on 4 KB-16 MB timing tables")
def test_fit_quality(request):
    tech = load_profile("default").params.tech
    assert DEFAULT_SIZES[0] == 4096 and DEFAULT_SIZES[-1] == 16 * 2**20
    t0 = time.perf_counter()
    clean = fit_beta_per_layers(generate_synthetic_samples(tech), tech.sigma)
    beta_err = max(abs(f.exponent - tech.beta(k)) for k, f in clean.items())
    worst = 0.0
    for seed in range(10):
        noisy = generate_synthetic_samples(tech, noise_pct=0.02, seed=seed)
        worst = max(worst, max(f.max_rel_error for f in fit_beta_per_layers(noisy, tech.sigma).values()))
    elapsed = time.perf_counter() - t0
    detail(request, f"noiseless beta error {beta_err:.1e}, worst 2%-noise error {100 * worst:.2f}%, "
                    f"{elapsed:.2f} s")
    assert beta_err <= 1e-6
    assert worst <= 0.025
    assert elapsed < 1.0


# -- 2 ----------------------------------------------------------------------------

@pytest.mark.criterion(2, "fitted beta and gamma inside the published ranges")
def test_parameter_ranges(request):
    t0 = time.perf_counter()
    betas, gammas = [], []
    for name in PROFILES:
        tech = load_profile(name).params.tech
        for seed in range(3):
            samples = generate_synthetic_samples(tech, noise_pct=0.02, seed=seed)
            betas += [f.exponent for f in fit_beta_per_layers(samples, tech.sigma).values()]
            area = generate_synthetic_samples(tech, noise_pct=0.02, seed=seed, kind="area")
            gammas.append(fit_area(area, tech.sigma).exponent)
    elapsed = time.perf_counter() - t0
    detail(request, f"beta in [{min(betas):.4f}, {max(betas):.4f}], "
                    f"gamma in [{min(gammas):.4f}, {max(gammas):.4f}], {elapsed:.2f} s")
    assert all(0.4 <= b <= 0.6 for b in betas)
    assert all(1.35 <= g <= 1.45 for g in gammas)
    assert elapsed < 1.0


# -- 3 ----------------------------------------------------------------------------

@pytest.mark.criterion(3, "optimizer matches the grid-search oracle on 20 random instances")
def test_oracle_equivalence(request, unconstrained_result):
    t0 = time.perf_counter()
    x = unconstrained_result.winner
    ev = evaluate_arrays(x.depth, np.asarray(x.sizes), np.asarray(x.partitions), P)
    usage = {"area": float(ev.area), "power": float(ev.power), "m_s": float(ev.m_s)}
    instances = random_instances(P, INSTANCE_SEEDS, usage)
    assert len(instances) == 20
    rows = run_comparison(P, instances, ORACLE_GRID)
    elapsed = time.perf_counter() - t0
    gaps = [abs(r.rel_gap) for r in rows if not math.isnan(r.rel_gap)]
    mismatches = [r for r in rows if math.isnan(r.rel_gap) and math.isfinite(r.opt_delay) != math.isfinite(r.oracle_delay)]
    detail(request, f"{len(gaps)} comparable depths, max |gap| {100 * max(gaps):.3f}%, "
                    f"{len(mismatches)} feasibility disagreements, {elapsed:.0f} s")
    assert not mismatches
    assert max(gaps) <= 0.005
    assert elapsed < 300


# -- 4 ----------------------------------------------------------------------------

@pytest.mark.criterion(4, "analytic penalty gradients match finite differences")
def test_gradient_correctness(request):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, checked = 0.0, 0
    while checked < 100:
        depth = int(rng.integers(1, 4))
        sizes = tuple(np.cumsum(np.exp(rng.uniform(0, 6, depth))))
        layers = tuple(int(v) for v in rng.multinomial(16 - depth, np.ones(depth) / depth) + 1)
        x = OptVector(sizes, layers)
        ev = evaluate_arrays(depth, np.asarray(sizes), np.asarray(layers), P)
        if not np.isfinite(ev.delay):
            continue  # outside the model's domain
        delta = np.exp(rng.uniform(np.log(1e-4), np.log(1e-2), 3))
        cons = ConstraintSet(a_max=float(ev.area) / (1 + delta[0]), p_max=float(ev.power) / (1 + delta[1]),
                             m_s_max=float(ev.m_s) / (1 + delta[2]))
        w = 10.0 ** rng.uniform(1, 4)
        analytic = penalty_gradient(x, P, cons, w)
        fd = gradient_sizes(x, P, cons, w) - gradient_sizes(x, P, cons, 0.0)
        err = np.abs(fd - analytic).max() / np.abs(analytic).max()
        worst = max(worst, err)
        checked += 1
    elapsed = time.perf_counter() - t0
    detail(request, f"worst relative error {worst:.1e} over {checked} points, {elapsed:.2f} s")
    assert worst <= 1e-3
    assert elapsed < 10


# -- 5 ----------------------------------------------------------------------------

@pytest.mark.criterion(5, "area-only sweep deepens 1 -> 2 -> 3 with falling delay")
def test_area_sweep_pattern(request, default_sweep):
    cfg, rows, elapsed = default_sweep
    depths = [r.winner_depth for r in rows]
    delays = [r.delay for r in rows]
    detail(request, f"depths {depths}, {elapsed:.0f} s")
    assert cfg.constraints.limits() == {}
    assert all(r.feasible for r in rows)
    assert all(b >= a for a, b in zip(depths, depths[1:]))
    assert {1, 2, 3} <= set(depths)
    assert all(b <= a * (1 + 1e-9) for a, b in zip(delays, delays[1:]))
    assert elapsed < 60


# -- 6 ----------------------------------------------------------------------------

@pytest.mark.criterion(6, "tight-power sweep rises then collapses back to one level")
def test_tight_power_collapse(request):
    _, rows, _ = profile_sweep("tight_power")
    depths = [r.winner_depth for r in rows]
    detail(request, f"depths {depths}")
    assert all(d is not None for d in depths)
    peak = int(np.argmax(depths))
    assert depths[0] == 1 and depths[peak] > 1
    assert depths[-1] == 1
    assert all(d == 1 for d in depths[depths.index(1, peak):])


# -- 7 ----------------------------------------------------------------------------

@pytest.mark.criterion(7, "NoC-limited sweep is infeasible below a threshold, then three levels")
def test_noc_limited_threshold(request):
    _, rows, _ = profile_sweep("noc_limited")
    depths = [r.winner_depth for r in rows]
    detail(request, f"depths {depths}")
    first = next(i for i, d in enumerate(depths) if d is not None)
    assert first > 0
    assert all(d is None for d in depths[:first])
    assert depths[first] == 3
    assert all(d is not None for d in depths[first:])


# -- 8 ----------------------------------------------------------------------------

@pytest.mark.criterion(8, "shared level gets at most two layers at three-level optima")
def test_shared_level_layers(request, default_sweep):
    cfg, rows, _ = default_sweep
    total = cfg.constraints.total_layers
    deep = [r.layers for r in rows if r.winner_depth == 3]
    detail(request, f"{len(deep)} three-level points, shared layers {sorted({l[-1] for l in deep})}")
    assert total == 16 and deep
    for layers in deep:
        assert layers[-1] <= 2
        assert sum(layers[:-1]) == total - layers[-1]


# -- 9 ----------------------------------------------------------------------------

@pytest.mark.criterion(9, "invariant suites")
def test_invariant_suites(request):
    rng = np.random.default_rng(99)
    t0 = time.perf_counter()

    # time-scale argmin invariance
    cons = ConstraintSet(a_max=float(np.exp(rng.uniform(0, 3))))
    base = optimize(P, cons, seed=3)
    for c in (2.0**-3, 2.0**5):
        scaled = optimize(P.scaled_time(c), cons, seed=3)
        assert scaled.winner_depth == base.winner_depth
        assert scaled.winner == base.winner
        assert scaled.delay == pytest.approx(c * base.delay, rel=1e-12)

    # power is independent of the 3D partitioning
    for _ in range(200):
        depth = int(rng.integers(1, 4))
        sizes = tuple(4096.0 * np.cumsum(np.exp(rng.uniform(0, 8, depth))))
        pa = [tuple(int(v) for v in rng.integers(1, 9, 2)) for _ in range(depth)]
        pb = [tuple(int(v) for v in rng.integers(1, 9, 2)) for _ in range(depth)]
        assert total_power(HierarchyConfig(depth, sizes, pa), P.tech) == \
            total_power(HierarchyConfig(depth, sizes, pb), P.tech)

    # looser budgets never hurt
    budgets = sorted(np.exp(rng.uniform(np.log(0.5), np.log(50), 3)))
    delays = [optimize(P, ConstraintSet(a_max=float(a), p_max=12.0), seed=3).delay for a in budgets]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(delays, delays[1:]))

    # bit-identical reruns
    a = optimize(P, ConstraintSet(a_max=2.5, m_s_max=0.05), seed=8).to_dict()
    b = optimize(P, ConstraintSet(a_max=2.5, m_s_max=0.05), seed=8).to_dict()
    assert a == b

    # miss rates fall as their governing capacity grows
    for _ in range(300):
        depth = int(rng.integers(1, 4))
        gaps = np.exp(rng.uniform(-3, 10, depth))
        level = int(rng.integers(depth))
        wider = gaps.copy()
        wider[level] *= np.exp(rng.uniform(0.01, 3))
        lo, _ = miss_rate_arrays(depth, np.cumsum(gaps), P.workload, P.tech, clamp=False)
        hi, _ = miss_rate_arrays(depth, np.cumsum(wider), P.workload, P.tech, clamp=False)
        assert float(hi[level]) < float(lo[level])

    elapsed = time.perf_counter() - t0
    detail(request, f"{elapsed:.0f} s")
    assert elapsed < 60
