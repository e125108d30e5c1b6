"""Brute-force grid search used to cross-check the optimizer.

The oracle shares nothing with the optimizer except the closed-form model:
no penalties, no simplex, no coordinate transform.  It evaluates every
strictly ordered tuple of grid sizes against every layer assignment, keeps
points that satisfy all constraints under direct evaluation, and then zooms
in around the incumbent.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, NoViableConfiguration
from .models import ModelParams, evaluate_arrays
from .optimizer import (
    SIZE_MAX,
    SIZE_MIN,
    ConstraintSet,
    OptimizationResult,
    OptVector,
    optimize,
    partition_assignments,
)

REL_GAP_TOL = 0.005
ZOOM = 4
CHUNK = 1 << 20

# seeds behind the published random comparison instances
INSTANCE_SEEDS = tuple(range(1000, 1020))


@dataclass(frozen=True)
class GridSpec:
    size_points: int = 48
    include_partitions: bool = True
    refinement_rounds: int = 2
    # explicit size grid (units of sigma); overrides size_points when given
    size_values: Optional[Tuple[float, ...]] = None
    # layer counts used when include_partitions is False
    fixed_partitions: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.size_values is None and self.size_points < 8:
            raise DomainError(f"size_points must be >= 8, got {self.size_points}")
        if self.refinement_rounds < 0:
            raise DomainError("refinement_rounds must be >= 0")

    def base_grid(self) -> np.ndarray:
        if self.size_values is not None:
            return np.unique(np.asarray(self.size_values, dtype=float))
        return np.geomspace(SIZE_MIN, SIZE_MAX, self.size_points)


@dataclass
class OracleResult:
    depth: int
    x: Optional[OptVector]
    delay: float
    feasible: bool
    history: List[float]  # best delay after the base grid and after each round


def _assignments(depth: int, constraints: ConstraintSet, grid: GridSpec) -> np.ndarray:
    if grid.include_partitions:
        return partition_assignments(depth, constraints.total_layers)
    fixed = grid.fixed_partitions or (1,) * depth
    return np.array([fixed[:depth]], dtype=int)


def _scan(depth, tuples, parts, params, constraints):
    """Best feasible (delay, tuple, parts) and least-violating (viol, tuple, parts)."""
    limits = constraints.limits()
    best = (math.inf, None, None)
    least = (math.inf, None, None)
    n_p = len(parts)
    per_chunk = max(1, CHUNK // n_p)
    for start in range(0, len(tuples), per_chunk):
        t = tuples[start:start + per_chunk]
        s = np.repeat(t, n_p, axis=0)
        n = np.tile(parts, (len(t), 1))
        ev = evaluate_arrays(depth, s, n, params)
        ok = np.isfinite(ev.delay)
        viol = np.where(ok, 0.0, math.inf)
        usage = {"area": ev.area, "power": ev.power, "m_s": ev.m_s}
        for k, lim in limits.items():
            ok &= usage[k] <= lim
            viol = viol + np.maximum(0.0, usage[k] / lim - 1.0)
        if ok.any():
            d = np.where(ok, ev.delay, math.inf)
            i = int(np.argmin(d))
            if d[i] < best[0]:
                best = (float(d[i]), s[i], n[i])
        i = int(np.argmin(viol))
        if viol[i] < least[0]:
            least = (float(viol[i]), s[i], n[i])
    return best, least


def _ordered_tuples(axes: Sequence[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    if pts.shape[1] > 1:
        pts = pts[np.all(np.diff(pts, axis=1) > 0, axis=1)]
    return pts


def grid_search(depth: int, params: ModelParams, constraints: ConstraintSet,
                grid: GridSpec = GridSpec()) -> OracleResult:
    """Exhaustive search of one depth on a (refined) log grid."""
    if depth not in (1, 2, 3):
        raise DomainError(f"depth must be 1, 2 or 3, got {depth}")
    parts = _assignments(depth, constraints, grid)
    base = grid.base_grid()
    if depth == 1:
        tuples = base[:, None]
    else:
        tuples = np.array(list(itertools.combinations(base, depth)), dtype=float).reshape(-1, depth)
    best, least = _scan(depth, tuples, parts, params, constraints)
    history = [best[0]]

    log_base = np.log(base)
    spacing = float(np.max(np.diff(log_base))) if len(base) > 1 else 1.0
    lo, hi = math.log(SIZE_MIN), math.log(SIZE_MAX)
    for _ in range(grid.refinement_rounds):
        centre = best[1] if best[1] is not None else least[1]
        if centre is None:
            break
        new_spacing = spacing / ZOOM
        offsets = np.arange(-2 * ZOOM, 2 * ZOOM + 1) * new_spacing
        axes = []
        for c in np.log(centre):
            ax = c + offsets
            axes.append(np.exp(ax[(ax >= lo - 1e-12) & (ax <= hi + 1e-12)]))
        tuples = _ordered_tuples(axes)
        cand, cand_least = _scan(depth, tuples, parts, params, constraints)
        if cand[0] < best[0]:
            best = cand
        if cand_least[0] < least[0]:
            least = cand_least
        spacing = new_spacing
        history.append(best[0])

    if best[1] is None:
        x = None if least[1] is None else OptVector(tuple(map(float, least[1])), tuple(map(int, least[2])))
        return OracleResult(depth, x, math.inf, False, history)
    x = OptVector(tuple(map(float, best[1])), tuple(map(int, best[2])))
    return OracleResult(depth, x, best[0], True, history)


@dataclass
class ComparisonRow:
    instance_id: int
    depth: int
    opt_delay: float
    oracle_delay: float
    rel_gap: float
    flag: bool


def compare(opt_result: Optional[OptimizationResult], params: ModelParams, constraints: ConstraintSet,
            grid: GridSpec = GridSpec(), instance_id: int = 0) -> List[ComparisonRow]:
    """Per-depth optimizer-vs-oracle report.

    ``opt_result`` may be None when the optimizer found nothing feasible at
    any depth.  A row is flagged when exactly one side is feasible or when
    the optimizer's delay exceeds the oracle's by more than 0.5 %.
    """
    rows = []
    for depth in (1, 2, 3):
        orc = grid_search(depth, params, constraints, grid)
        opt = None if opt_result is None else opt_result.per_depth.get(depth)
        opt_ok = opt is not None and opt.feasible
        opt_d = opt.delay if opt_ok else math.inf
        if opt_ok and orc.feasible:
            gap = (opt_d - orc.delay) / orc.delay
            flag = gap > REL_GAP_TOL
        else:
            gap = math.nan
            flag = opt_ok != orc.feasible
        rows.append(ComparisonRow(instance_id, depth, opt_d, orc.delay, gap, flag))
    return rows


def write_report(path, rows: Sequence[ComparisonRow]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance_id", "depth", "opt_delay", "oracle_delay", "rel_gap", "flag"])
        for r in rows:
            w.writerow([r.instance_id, r.depth, repr(r.opt_delay), repr(r.oracle_delay), repr(r.rel_gap), int(r.flag)])


def reference_usage(params: ModelParams, total_layers: int = 16, seed: int = 0) -> dict:
    """Resources used by the unconstrained optimum."""
    res = optimize(params, ConstraintSet(total_layers=total_layers), seed=seed)
    ev = evaluate_arrays(res.winner_depth, np.asarray(res.winner.sizes), np.asarray(res.winner.partitions), params)
    return {"area": float(ev.area), "power": float(ev.power), "m_s": float(ev.m_s)}


def random_instances(params: ModelParams, seeds: Sequence[int] = INSTANCE_SEEDS,
                     usage: Optional[dict] = None) -> List[ConstraintSet]:
    """Constraint sets with budgets log-uniform in [0.1x, 10x] of ``usage``.

    Each constraint is present with probability 2/3 (at least one always is),
    so binding and slack regimes both appear.
    """
    usage = usage or reference_usage(params)
    out = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        present = rng.uniform(size=3) < 2 / 3
        if not present.any():
            present[rng.integers(3)] = True
        factors = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=3))
        kw = {}
        for on, f, (name, key) in zip(present, factors, (("a_max", "area"), ("p_max", "power"), ("m_s_max", "m_s"))):
            if on:
                kw[name] = float(f * usage[key])
        out.append(ConstraintSet(**kw))
    return out


def run_comparison(params: ModelParams, instances: Sequence[ConstraintSet], grid: GridSpec = GridSpec(),
                   seed: int = 0) -> List[ComparisonRow]:
    rows = []
    for i, cons in enumerate(instances):
        try:
            res = optimize(params, cons, seed=seed)
        except NoViableConfiguration:
            res = None
        rows.extend(compare(res, params, cons, grid, instance_id=i))
    return rows
