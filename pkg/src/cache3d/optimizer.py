"""Constrained minimisation of average memory delay.

For each hierarchy depth the optimizer enumerates every assignment of 3D
layers to levels (``N_1 + ... + N_depth <= total_layers``, ``N_y = 1``) and,
for each assignment, minimises the penalised delay over the continuous level
sizes with a multi-start simplex search.  The constraints enter through a
quadratic penalty on their *relative* violation whose weight escalates over
a fixed schedule; a bisection pulls the answer back onto the feasible side
of any binding constraint, and the best few candidates are finished with a
local SQP step that slides along active constraints.  The best depth is then chosen with
:func:`~cache3d.models.objective_min`.

The optimiser works in the coordinates ``u_1 = ln(S_1/sigma)`` and
``u_i = ln((S_i - S_{i-1})/sigma)`` so the inclusive ordering holds by
construction.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, nnls

from .errors import DomainError, NoViableConfiguration
from .models import HierarchyConfig, ModelParams, evaluate_arrays, objective_min
from .simplex import nelder_mead_batch

log = logging.getLogger(__name__)

SIZE_MIN = 1.0  # level floor, in units of sigma
SIZE_MAX = 1e6
DELTA_MIN = 1e-6
PENALTY_SCHEDULE = (1e1, 1e2, 1e3, 1e4)
N_STARTS = 8
N_POLISH = 4  # best rows per depth handed to the local SQP polish
STAGE_TOL = dict(xtol=1e-2, ftol=1e-5)  # simplex tolerances before the last penalty stage
FINAL_TOL = dict(xtol=1e-7, ftol=1e-11)
# rows whose penalised value exceeds the incumbent by this factor stop early
PRUNE_MARGIN = 0.1
SENTINEL_FACTOR = 1e6  # saturated points cost SENTINEL_FACTOR * d_dram
BINDING_TOL = 1e-4
CONSTRAINT_NAMES = ("area", "power", "m_s")


@dataclass(frozen=True)
class ConstraintSet:
    a_max: Optional[float] = None
    p_max: Optional[float] = None
    m_s_max: Optional[float] = None
    total_layers: int = 16

    def __post_init__(self):
        for name in ("a_max", "p_max", "m_s_max"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"constraints.{name} must be > 0 when present, got {v}")
        if int(self.total_layers) != self.total_layers or self.total_layers < 1:
            raise DomainError(f"constraints.total_layers must be a positive integer, got {self.total_layers}")

    def limits(self) -> Dict[str, float]:
        """Present budgets keyed by constraint name."""
        out = {}
        for name, v in zip(CONSTRAINT_NAMES, (self.a_max, self.p_max, self.m_s_max)):
            if v is not None:
                out[name] = float(v)
        return out

    def replace(self, **kw) -> "ConstraintSet":
        d = asdict(self)
        d.update(kw)
        return ConstraintSet(**d)


@dataclass(frozen=True)
class OptVector:
    """Level sizes in units of sigma and per-level layer counts."""

    sizes: Tuple[float, ...]
    partitions: Tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.sizes)

    def to_config(self, sigma: float) -> HierarchyConfig:
        return HierarchyConfig.from_ratios(self.sizes, self.partitions, sigma)


@dataclass
class DepthResult:
    depth: int
    x: Optional[OptVector]
    delay: float
    feasible: bool
    violation: float = 0.0  # summed relative violation of the returned point


@dataclass
class BindingConstraint:
    name: str
    usage: float
    limit: float
    residual: float  # (limit - usage) / limit


@dataclass
class OptimizationResult:
    per_depth: Dict[int, DepthResult]
    winner_depth: int
    winner: OptVector
    delay: float
    binding: List[BindingConstraint] = field(default_factory=list)
    stationarity: float = float("nan")
    multipliers: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def vec(x):
            return None if x is None else {"sizes": list(x.sizes), "partitions": list(x.partitions)}

        return {
            "winner_depth": self.winner_depth,
            "delay": self.delay,
            "winner": vec(self.winner),
            "per_depth": {
                str(d): {"feasible": r.feasible, "delay": r.delay if r.feasible else None,
                         "violation": r.violation, "x": vec(r.x)}
                for d, r in self.per_depth.items()
            },
            "binding": [asdict(b) for b in self.binding],
            "stationarity": self.stationarity,
            "multipliers": self.multipliers,
        }


@lru_cache(maxsize=None)
def partition_assignments(depth: int, total_layers: int) -> np.ndarray:
    """All (N_1..N_depth) with N_i >= 1 and sum <= total_layers, lexicographic."""
    rng = range(1, total_layers + 1)
    out = [p for p in itertools.product(rng, repeat=depth) if sum(p) <= total_layers]
    return np.array(out, dtype=int).reshape(-1, depth)


# -- coordinate maps ---------------------------------------------------------------

def sizes_to_u(sizes) -> np.ndarray:
    s = np.asarray(sizes, dtype=float)
    return np.log(np.diff(s, axis=-1, prepend=0.0))


def u_to_sizes(u) -> Tuple[np.ndarray, np.ndarray]:
    """Clip ``u`` into the search box; return sizes and the squared clip distance."""
    u = np.asarray(u, dtype=float)
    lo = np.full(u.shape[-1], math.log(DELTA_MIN))
    lo[0] = math.log(SIZE_MIN)
    uc = np.clip(u, lo, math.log(SIZE_MAX))
    s = np.cumsum(np.exp(uc), axis=-1)
    over = np.maximum(0.0, np.log(s[..., -1]) - math.log(SIZE_MAX))
    dist = ((u - uc) ** 2).sum(axis=-1) + over**2
    if np.any(over > 0):
        s = s * np.exp(-over)[..., None]
    return s, dist


# -- constraint algebra --------------------------------------------------------------

def constraint_usage(ev, constraints: ConstraintSet) -> Dict[str, np.ndarray]:
    usage = {"area": ev.area, "power": ev.power, "m_s": ev.m_s}
    return {k: usage[k] for k in constraints.limits()}


def relative_violation(ev, constraints: ConstraintSet) -> Dict[str, np.ndarray]:
    limits = constraints.limits()
    return {k: np.maximum(0.0, g / limits[k] - 1.0) for k, g in constraint_usage(ev, constraints).items()}


def is_feasible(ev, constraints: ConstraintSet) -> np.ndarray:
    ok = np.isfinite(ev.delay)
    limits = constraints.limits()
    for k, g in constraint_usage(ev, constraints).items():
        ok = ok & (g <= limits[k])
    return ok


def _penalised(ev, params: ModelParams, constraints: ConstraintSet, weight: float):
    viol = relative_violation(ev, constraints)
    pen = sum((v**2 for v in viol.values()), np.zeros_like(ev.delay))
    sentinel = SENTINEL_FACTOR * params.tech.d_dram
    value = np.where(np.isfinite(ev.delay), ev.delay + weight * params.tech.tau * pen, sentinel)
    return value


def penalized_objective(x: OptVector, params: ModelParams, constraints: ConstraintSet,
                        penalty_weight: float) -> float:
    """Delay plus ``penalty_weight * tau * sum(max(0, g/L - 1)**2)``.

    A saturated NoC returns ``1e6 * d_dram`` instead of raising.
    """
    ev = evaluate_arrays(x.depth, np.asarray(x.sizes), np.asarray(x.partitions), params)
    return float(_penalised(ev, params, constraints, penalty_weight))


def constraint_gradients(x: OptVector, params: ModelParams, constraints: ConstraintSet) -> Dict[str, np.ndarray]:
    """Analytic d(usage)/d(S_i) for every present constraint (sizes in sigma units)."""
    tech, wl = params.tech, params.workload
    s = np.asarray(x.sizes, dtype=float)
    depth = len(s)
    out = {}
    limits = constraints.limits()
    if "area" in limits:
        out["area"] = tech.alpha * tech.gamma * s ** (tech.gamma - 1)
    if "power" in limits:
        out["power"] = tech.rho / (2.0 * np.sqrt(s))
    if "m_s" in limits:
        out["m_s"] = _shared_rate_gradient(s, depth, params)
    return out


def _shared_rate_gradient(s, depth, params: ModelParams) -> np.ndarray:
    tech, wl = params.tech, params.workload
    mu, mu_n, e_n = tech.mu, wl.mu_n, wl.e_n
    g = np.zeros(depth)

    def m_and_slope(eff, scale):
        # m = mu_n + scale / sqrt(eff); zero slope while clamped at 1
        m = mu_n + scale / math.sqrt(eff)
        if m >= 1.0:
            return 1.0, 0.0
        return m, -0.5 * scale * eff**-1.5

    if depth == 1:
        _, g[0] = m_and_slope(s[0], (1 - mu_n) * mu * e_n)
    elif depth == 2:
        _, g[0] = m_and_slope(s[0], (1 - mu_n) * mu)
    else:
        m1, d1 = m_and_slope(s[0], (1 - mu_n) * mu)
        m2, d2 = m_and_slope(s[1] - s[0], (1 - mu_n) * mu)
        g[0] = d1 * m2 - m1 * d2
        g[1] = m1 * d2
    return g


def penalty_gradient(x: OptVector, params: ModelParams, constraints: ConstraintSet,
                     penalty_weight: float) -> np.ndarray:
    """Analytic gradient of the penalty term alone, with respect to S_i."""
    ev = evaluate_arrays(x.depth, np.asarray(x.sizes), np.asarray(x.partitions), params)
    viol = relative_violation(ev, constraints)
    limits = constraints.limits()
    grads = constraint_gradients(x, params, constraints)
    total = np.zeros(x.depth)
    for k, v in viol.items():
        total += 2.0 * penalty_weight * params.tech.tau * float(v) / limits[k] * grads[k]
    return total


def gradient_sizes(x: OptVector, params: ModelParams, constraints: ConstraintSet,
                   penalty_weight: float, rel_step: float = 1e-6) -> np.ndarray:
    """Finite-difference gradient of the penalised objective over S_i.

    Central differences with step ``rel_step * S_i``; falls back to a
    one-sided difference (with a warning) where the central stencil would
    break the size ordering.
    """
    s = np.asarray(x.sizes, dtype=float)
    depth = len(s)
    grad = np.zeros(depth)

    def f(sizes):
        return penalized_objective(OptVector(tuple(sizes), x.partitions), params, constraints, penalty_weight)

    f0 = None
    for i in range(depth):
        h = rel_step * s[i]
        lo_ok = i == 0 or s[i] - h > s[i - 1]
        hi_ok = i == depth - 1 or s[i] + h < s[i + 1]
        up, dn = s.copy(), s.copy()
        up[i] += h
        dn[i] -= h
        if lo_ok and hi_ok:
            grad[i] = (f(up) - f(dn)) / (2 * h)
            continue
        warnings.warn(f"size {i + 1} is within one step of an ordering boundary; using a one-sided difference",
                      RuntimeWarning, stacklevel=2)
        if f0 is None:
            f0 = f(s)
        grad[i] = (f(up) - f0) / h if hi_ok else (f0 - f(dn)) / h
    return grad


def stationarity(x: OptVector, params: ModelParams, constraints: ConstraintSet,
                 active_tol: float = BINDING_TOL) -> Tuple[float, Dict[str, float]]:
    """KKT stationarity residual at a feasible point and the multipliers behind it.

    Gradients are taken with respect to ``ln S_i`` and divided by the delay,
    so the residual is dimensionless.  Active constraints (relative slack
    within ``active_tol``, plus the size floor and ceiling) are removed by a
    non-negative least-squares fit of their normals.  The multipliers are in
    delay per unit of each resource.
    """
    s = np.asarray(x.sizes, dtype=float)
    d0 = penalized_objective(x, params, ConstraintSet(total_layers=constraints.total_layers), 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g_delay = gradient_sizes(x, params, ConstraintSet(total_layers=constraints.total_layers), 0.0)
    scale = s / d0
    b = -(g_delay * scale)

    ev = evaluate_arrays(x.depth, s, np.asarray(x.partitions), params)
    usage = {k: float(v) for k, v in constraint_usage(ev, constraints).items()}
    limits = constraints.limits()
    grads = constraint_gradients(x, params, constraints)
    cols, names = [], []
    for k, lim in limits.items():
        if abs(lim - usage[k]) <= active_tol * lim:
            cols.append(grads[k] * scale)
            names.append(k)
    if s[0] <= SIZE_MIN * (1 + 1e-6):
        e = np.zeros(len(s))
        e[0] = -1.0
        cols.append(e * scale)
        names.append("size_floor")
    if s[-1] >= SIZE_MAX * (1 - 1e-6):
        e = np.zeros(len(s))
        e[-1] = 1.0
        cols.append(e * scale)
        names.append("size_ceiling")
    if not cols:
        return float(np.linalg.norm(b)), {}
    a = np.column_stack(cols)
    # nnls is scale-sensitive; normalise columns and map multipliers back
    norms = np.linalg.norm(a, axis=0)
    norms[norms == 0] = 1.0
    lam, resid = nnls(a / norms, b)
    lam = lam / norms
    return float(resid), {k: float(v) for k, v in zip(names, lam)}


def stationarity_residual(x: OptVector, params: ModelParams, constraints: ConstraintSet) -> float:
    return stationarity(x, params, constraints)[0]


# -- search --------------------------------------------------------------------------

def _starts(depth: int, n_starts: int, seed: int) -> np.ndarray:
    """Ordered log-uniform size vectors over the search box, as u-coordinates."""
    rng = np.random.default_rng([seed, depth])
    lo, hi = math.log(SIZE_MIN), math.log(SIZE_MAX)
    raw = np.sort(rng.uniform(lo, hi, size=(n_starts, depth)), axis=1)
    sizes = np.exp(raw)
    # keep strictly increasing after rounding
    sizes = np.maximum.accumulate(sizes * (1 + 1e-9 * np.arange(depth)), axis=1)
    return sizes_to_u(sizes)


def _search_chunk(depth, parts, starts, params, constraints, max_iter):
    """Penalty schedule + feasibility polish for one block of assignments.

    Rows are (assignment, start) pairs in assignment-major order.  After each
    penalty stage, starts of one assignment that have collapsed onto the same
    point are merged (the lower start index survives), and rows whose
    penalised value already exceeds the best feasible delay seen are retired.
    """
    n_a, n_s = len(parts), len(starts)
    b = n_a * n_s
    part_rows = np.repeat(parts, n_s, axis=0)
    beta_rows = params.tech.beta(part_rows).reshape(b, depth)
    u_all = np.tile(starts, (n_a, 1))
    alive = np.arange(b)
    best_feas_f = np.full(b, np.inf)
    best_feas_u = np.full((b, depth), np.nan)
    tau = params.tech.tau

    def evaluate(points, rows):
        sizes, dist = u_to_sizes(points)
        return evaluate_arrays(depth, sizes, part_rows[rows], params, beta_rows[rows]), dist

    def make_func(weight):
        def func(points, sub):
            rows = alive[sub]
            ev, dist = evaluate(points, rows)
            val = _penalised(ev, params, constraints, weight)
            ok = is_feasible(ev, constraints) & (dist == 0)
            if ok.any():
                r, f, p = rows[ok], ev.delay[ok], points[ok]
                # one row can appear several times in a batch (shrink); keep its best
                order = np.lexsort((f, r))
                r, f, p = r[order], f[order], p[order]
                first = np.ones(len(r), dtype=bool)
                first[1:] = r[1:] != r[:-1]
                r, f, p = r[first], f[first], p[first]
                better = f < best_feas_f[r]
                best_feas_f[r[better]] = f[better]
                best_feas_u[r[better]] = p[better]
            return val + 1e4 * tau * dist
        return func

    step = 0.5
    for k, weight in enumerate(PENALTY_SCHEDULE):
        # only the last stage is converged tightly
        last = k == len(PENALTY_SCHEDULE) - 1
        tol = FINAL_TOL if last else STAGE_TOL
        u, f, _ = nelder_mead_batch(make_func(weight), u_all[alive], step=step, max_iter=max_iter, **tol)
        u_all[alive] = u
        if not last:
            # the penalty vanishes on the feasible set, so f bounds a row's
            # feasible delay from below; rows already beaten are dropped
            incumbent = best_feas_f.min()
            if math.isfinite(incumbent):
                keep = f <= incumbent * (1 + PRUNE_MARGIN)
                alive, u = alive[keep], u[keep]
        alive = _merge_duplicates(alive, u, n_s, tol=1e-4 if last else 1e-2)
        step = 0.1

    u_pen = u_all
    ev_pen, _ = evaluate(u_pen, np.arange(b))
    pen_ok = is_feasible(ev_pen, constraints)
    dead = np.ones(b, dtype=bool)
    dead[alive] = False
    pen_ok[dead] = False
    has_feas = np.isfinite(best_feas_f)
    final_u = np.where(pen_ok[:, None], u_pen, best_feas_u)
    final_f = np.where(pen_ok, ev_pen.delay, best_feas_f)

    # polish: bisect from the best feasible point seen towards the penalty optimum
    need = ~pen_ok & has_feas
    need[dead] = False
    if need.any():
        rows = np.flatnonzero(need)
        lo = np.zeros(rows.size)
        hi = np.ones(rows.size)
        uf, up = best_feas_u[rows], u_pen[rows]
        for _ in range(48):
            mid = 0.5 * (lo + hi)
            ev, _ = evaluate(uf + mid[:, None] * (up - uf), rows)
            ok = is_feasible(ev, constraints)
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        pts = uf + lo[:, None] * (up - uf)
        ev, _ = evaluate(pts, rows)
        better = is_feasible(ev, constraints) & (ev.delay < best_feas_f[rows])
        final_u[rows[better]] = pts[better]
        final_f[rows[better]] = ev.delay[better]

    feasible = pen_ok | has_feas
    viol = relative_violation(ev_pen, constraints)
    total_viol = sum(viol.values(), np.zeros(b)) + np.where(np.isfinite(ev_pen.delay), 0.0, np.inf)
    total_viol[dead] = np.inf
    return final_u, np.where(feasible, final_f, np.inf), feasible, u_pen, total_viol, part_rows


def _merge_duplicates(alive, u, n_starts, tol=1e-4):
    """Drop rows whose point coincides with an earlier start of the same assignment."""
    keep = np.ones(len(alive), dtype=bool)
    group = alive // n_starts
    # rows are sorted by (assignment, start); compare within each group
    for lag in range(1, n_starts):
        if lag >= len(alive):
            break
        same = (group[lag:] == group[:-lag]) & keep[:-lag]
        close = np.max(np.abs(u[lag:] - u[:-lag]), axis=1) <= tol
        keep[lag:] &= ~(same & close)
    return alive[keep]


def _sqp_polish(depth, layers, u0, params: ModelParams, constraints: ConstraintSet):
    """Local SLSQP run from a feasible ``u0``; returns (u, delay) or None.

    The simplex stalls short of the optimum when it has to follow a curved
    active constraint; SQP handles that geometry directly.  Limits are
    tightened by a hair so the result stays feasible under exact evaluation.
    """
    layers = np.asarray(layers)
    betas = params.tech.beta(layers)
    sentinel = SENTINEL_FACTOR * params.tech.d_dram

    def ev_at(u):
        sizes, _ = u_to_sizes(u)
        return evaluate_arrays(depth, sizes, layers, params, betas)

    # measured in units of tau so the polish is blind to the time scale
    def objective(u):
        d = float(ev_at(u).delay)
        return (d if math.isfinite(d) else sentinel) / params.tech.tau

    cons = []
    for name, lim in constraints.limits().items():
        def slack(u, name=name, lim=lim):
            ev = ev_at(u)
            g = {"area": ev.area, "power": ev.power, "m_s": ev.m_s}[name]
            return (1.0 - 1e-10) - float(g) / lim
        cons.append({"type": "ineq", "fun": slack})
    lo = [math.log(SIZE_MIN)] + [math.log(DELTA_MIN)] * (depth - 1)
    bounds = [(a, math.log(SIZE_MAX)) for a in lo]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(objective, u0, method="SLSQP", bounds=bounds, constraints=cons,
                       options={"ftol": 1e-15, "maxiter": 200})
    u = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
    ev = ev_at(u)
    if not (is_feasible(ev, constraints) and u_to_sizes(u)[1] == 0):
        return None
    return u, float(ev.delay)


def optimize_depth(depth: int, params: ModelParams, constraints: ConstraintSet, seed: int = 0,
                   n_starts: int = N_STARTS, max_iter: int = 300, workers: int = 1) -> DepthResult:
    """Best design of a fixed depth.

    Work items are (assignment, start) pairs; with ``workers > 1`` blocks of
    assignments run on a thread pool and are merged in assignment order, so
    the answer does not depend on ``workers``.
    """
    if depth not in (1, 2, 3):
        raise DomainError(f"depth must be 1, 2 or 3, got {depth}")
    parts = partition_assignments(depth, constraints.total_layers)
    if len(parts) == 0:
        return DepthResult(depth, None, math.inf, False, math.inf)
    starts = _starts(depth, n_starts, seed)

    blocks = np.array_split(np.arange(len(parts)), max(1, min(workers, len(parts))))
    args = [(depth, parts[blk], starts, params, constraints, max_iter) for blk in blocks]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda a: _search_chunk(*a), args))
    else:
        chunks = [_search_chunk(*a) for a in args]
    final_u, final_f, feasible, u_pen, viol, part_rows = (np.concatenate(c) for c in zip(*chunks))

    if feasible.any():
        final_f = final_f.copy()
        order = np.argsort(final_f, kind="stable")[:N_POLISH]
        for i in order[np.isfinite(final_f[order])]:
            polished = _sqp_polish(depth, part_rows[i], final_u[i], params, constraints)
            if polished is not None and polished[1] < final_f[i]:
                final_u[i], final_f[i] = polished
        i = int(np.argmin(final_f))  # first minimum: lowest assignment, then start
        sizes, _ = u_to_sizes(final_u[i])
        x = OptVector(tuple(float(v) for v in sizes), tuple(int(n) for n in part_rows[i]))
        return DepthResult(depth, x, float(final_f[i]), True, 0.0)
    i = int(np.argmin(viol))
    sizes, _ = u_to_sizes(u_pen[i])
    x = OptVector(tuple(float(v) for v in sizes), tuple(int(n) for n in part_rows[i]))
    return DepthResult(depth, x, math.inf, False, float(viol[i]))


def binding_constraints(x: OptVector, params: ModelParams, constraints: ConstraintSet,
                        tol: float = BINDING_TOL) -> List[BindingConstraint]:
    ev = evaluate_arrays(x.depth, np.asarray(x.sizes), np.asarray(x.partitions), params)
    limits = constraints.limits()
    out = []
    for k, g in constraint_usage(ev, constraints).items():
        resid = (limits[k] - float(g)) / limits[k]
        if abs(resid) <= tol:
            out.append(BindingConstraint(k, float(g), limits[k], resid))
    return out


def optimize(params: ModelParams, constraints: ConstraintSet, seed: int = 0, n_starts: int = N_STARTS,
             workers: int = 1, depths: Sequence[int] = (1, 2, 3)) -> OptimizationResult:
    """Optimise every depth and keep the best.

    Raises NoViableConfiguration (carrying the per-depth diagnostics) when
    no depth has a feasible point.
    """
    per_depth = {d: optimize_depth(d, params, constraints, seed, n_starts, workers=workers) for d in depths}
    delays = [per_depth[d].delay if d in per_depth and per_depth[d].feasible else None for d in (1, 2, 3)]
    try:
        delay, depth = objective_min(*delays)
    except NoViableConfiguration:
        raise NoViableConfiguration(
            "no cache configuration satisfies the constraints",
            diagnostics={d: r for d, r in per_depth.items()},
        ) from None
    x = per_depth[depth].x
    resid, lams = stationarity(x, params, constraints)
    log.debug("winner depth %d delay %.6g stationarity %.3g", depth, delay, resid)
    return OptimizationResult(
        per_depth=per_depth,
        winner_depth=depth,
        winner=x,
        delay=delay,
        binding=binding_constraints(x, params, constraints),
        stationarity=resid,
        multipliers=lams,
    )
