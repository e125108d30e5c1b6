"""Power-law fitting for cache access-time and area tables.

Both laws have the shape ``y = c * x**e``:

* access time: ``t = tau * ((S / sigma) / layers) ** beta``
* area:        ``A = alpha * (S / sigma) ** gamma``

The least-squares fit starts from a log-space linear regression and refines
it with a damped Gauss-Newton (Levenberg-Marquardt) iteration on the
untransformed model, residuals weighted by ``1/y``.  The default
``loss="minimax"`` then moves to the parameters minimising the *maximum*
relative error, which is the quality figure the tables are judged by.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DomainError, FitError
from .models import TechnologyParams

CSV_HEADER = ("size_bytes", "layers", "value")

# 4 KB .. 16 MB in powers of two
DEFAULT_SIZES = tuple(4096 * 2**k for k in range(13))
DEFAULT_LAYERS = (1, 2, 4, 8, 16)

MAX_ITER = 100
STEP_TOL = 1e-10


@dataclass(frozen=True)
class Sample:
    size: float
    layers: int
    value: float

    def __post_init__(self):
        if not self.size > 0 or self.layers < 1 or not self.value > 0:
            raise DomainError(f"invalid sample {self}: need size > 0, layers >= 1, value > 0")


@dataclass(frozen=True)
class FitResult:
    coefficient: float
    exponent: float
    max_rel_error: float
    n_samples: int
    iterations: int = 0
    loss: str = "minimax"

    def predict(self, x):
        return self.coefficient * np.asarray(x, dtype=float) ** self.exponent


class MonotonicityWarning(UserWarning):
    """Fitted exponents do not decrease with the number of 3D layers."""


def max_relative_error(coefficient: float, exponent: float, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.max(np.abs(coefficient * x**exponent - y) / y))


def fit_power_law(samples: Iterable[Tuple[float, float]], loss: str = "minimax") -> FitResult:
    """Fit ``y = c * x**e`` to ``(x, y)`` pairs.

    ``loss`` selects the objective:

    ``"lsq"``
        least squares on relative residuals ``(c x**e - y) / y``.  The tables
        span several decades, so unweighted residuals would let the largest
        entries dominate.
    ``"abs"``
        plain unweighted least squares.
    ``"minimax"``
        minimise ``max |c x**e - y| / y``, starting from the ``"lsq"`` answer.
    """
    if loss not in ("lsq", "abs", "minimax"):
        raise FitError(f"unknown loss {loss!r}")
    pts = np.asarray(list(samples), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise FitError(f"need at least 3 (x, y) samples, got {len(pts)}")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(pts)):
        raise FitError("all samples must be finite with x > 0 and y > 0")
    if np.unique(x).size < 2:
        raise FitError("need at least two distinct x values")

    lx = np.log(x)
    exponent, log_c = np.polyfit(lx, np.log(y), 1)
    # parameters are (log c, e) so that rescaling y leaves every step unchanged
    p = np.array([log_c, exponent])

    w = np.ones_like(y) if loss == "abs" else 1.0 / y

    def residuals(p):
        return (np.exp(p[0] + p[1] * lx) - y) * w

    r = residuals(p)
    sse = r @ r
    damping = 1e-3
    it = 0
    for it in range(1, MAX_ITER + 1):
        model = np.exp(p[0] + p[1] * lx) * w
        jac = np.column_stack([model, model * lx])
        jtj = jac.T @ jac
        g = jac.T @ r
        while True:
            step = np.linalg.solve(jtj + damping * np.diag(np.diag(jtj)), -g)
            trial = p + step
            r_trial = residuals(trial)
            sse_trial = r_trial @ r_trial
            if sse_trial <= sse or damping > 1e12:
                break
            damping *= 10.0
        if sse_trial <= sse:
            p, r, sse = trial, r_trial, sse_trial
            damping = max(damping / 10.0, 1e-12)
        if np.max(np.abs(step)) < STEP_TOL:
            break

    if loss == "minimax":
        p = _minimax_relative(lx, np.log(y), p[1])
    c, e = float(np.exp(p[0])), float(p[1])
    return FitResult(c, e, max_relative_error(c, e, x, y), len(x), it, loss)


def _minimax_relative(lx, ly, e_seed):
    """Exact Chebyshev fit in relative error.

    For a fixed exponent the best coefficient balances the extreme ratios
    ``q_i = x_i**e / y_i`` and leaves an error ``(q_max - q_min) / (q_max + q_min)``,
    which grows with the spread of ``e*lx - ly``.  That spread is convex and
    piecewise linear in ``e``, so its minimum lies on a pairwise breakpoint.
    """
    i, j = np.triu_indices(len(lx), k=1)
    dx = lx[i] - lx[j]
    keep = dx != 0
    candidates = np.append((ly[i] - ly[j])[keep] / dx[keep], e_seed)
    z = candidates[:, None] * lx[None, :] - ly[None, :]
    spread = z.max(axis=1) - z.min(axis=1)
    best = np.flatnonzero(spread <= spread.min())
    # ties (flat bottom): stay closest to the least-squares exponent
    e = candidates[best[np.argmin(np.abs(candidates[best] - e_seed))]]
    zz = e * lx - ly
    # c = 2 / (q_max + q_min) with log q = zz
    log_c = np.log(2.0) - zz.max() - np.log1p(np.exp(zz.min() - zz.max()))
    return np.array([log_c, e])


def group_by_layers(samples: Sequence[Sample]) -> Dict[int, List[Sample]]:
    groups: Dict[int, List[Sample]] = {}
    for s in samples:
        groups.setdefault(int(s.layers), []).append(s)
    return dict(sorted(groups.items()))


def fit_beta_per_layers(samples: Sequence[Sample], sigma: float = 4096.0) -> Dict[int, FitResult]:
    """Fit the access-time law separately for each layer count.

    The regressor is ``(size / sigma) / layers``, so each result's coefficient
    estimates tau and its exponent estimates beta for that many layers.
    """
    results = {}
    for layers, group in group_by_layers(samples).items():
        if len(group) < 3:
            raise FitError(f"layer group {layers} has {len(group)} samples, need at least 3")
        try:
            results[layers] = fit_power_law([(s.size / sigma / layers, s.value) for s in group])
        except FitError as exc:
            raise FitError(f"layer group {layers}: {exc}") from exc
    betas = [r.exponent for r in results.values()]
    if any(b2 > b1 for b1, b2 in zip(betas, betas[1:])):
        warnings.warn(
            "fitted beta is not non-increasing in the layer count: "
            + ", ".join(f"{k}:{r.exponent:.4f}" for k, r in results.items()),
            MonotonicityWarning,
            stacklevel=2,
        )
    return results


def fit_area(samples: Sequence[Sample], sigma: float = 4096.0) -> FitResult:
    """Fit ``A = alpha * (S / sigma) ** gamma``; layer counts are ignored."""
    return fit_power_law([(s.size / sigma, s.value) for s in samples])


def generate_synthetic_samples(
    tech: TechnologyParams,
    sizes: Sequence[float] = DEFAULT_SIZES,
    layer_counts: Sequence[int] = DEFAULT_LAYERS,
    noise_pct: float = 0.0,
    seed: int = 0,
    kind: str = "time",
) -> List[Sample]:
    """Stand-in for a 3D CACTI table.

    ``noise_pct`` is a fraction: each value is multiplied by a factor drawn
    uniformly from ``[1 - noise_pct, 1 + noise_pct]``.  ``kind="area"``
    follows the area law and emits one sample per size with ``layers = 1``.
    """
    if noise_pct < 0 or noise_pct >= 1:
        raise DomainError(f"noise_pct must lie in [0, 1), got {noise_pct}")
    if not len(sizes) or not len(layer_counts):
        raise DomainError("sizes and layer_counts must be non-empty")
    if kind not in ("time", "area"):
        raise DomainError(f"kind must be 'time' or 'area', got {kind!r}")
    rng = np.random.default_rng(seed)
    if kind == "area":
        layer_counts = (1,)
    out = []
    for layers in layer_counts:
        for size in sizes:
            ratio = size / tech.sigma
            if kind == "time":
                value = tech.tau * (ratio / layers) ** tech.beta(layers)
            else:
                value = tech.alpha * ratio**tech.gamma
            if noise_pct:
                value *= rng.uniform(1 - noise_pct, 1 + noise_pct)
            out.append(Sample(float(size), int(layers), float(value)))
    return out


def read_samples_csv(path) -> List[Sample]:
    """Read a ``size_bytes,layers,value`` table; errors carry file and line."""
    path = Path(path)
    samples = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise FitError(f"{path}:1: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                size, layers, value = row
                samples.append(Sample(float(size), int(layers), float(value)))
            except (ValueError, DomainError) as exc:
                raise FitError(f"{path}:{lineno}: {exc}") from exc
    return samples


def write_samples_csv(path, samples: Sequence[Sample]) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for s in samples:
            writer.writerow([repr(float(s.size)) if s.size % 1 else int(s.size), s.layers, repr(s.value)])
