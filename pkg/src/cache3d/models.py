"""Closed-form timing, miss-rate, delay, power and area models.

Every quantity is a pure function of its inputs.  Sizes handed to the public
scalar functions are in bytes; internally everything is expressed as a ratio
to the baseline size ``sigma``.  The ``*_arrays`` helpers are the vectorised
kernels the optimizer and the grid oracle evaluate in bulk; the scalar
functions wrap them and turn out-of-domain inputs into exceptions.

Hierarchy shapes:

* depth 1 -- one private level, misses go over the NoC to DRAM
* depth 2 -- private L1 + shared L2
* depth 3 -- private L1, private L2 + shared L3
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, NoViableConfiguration, SaturationError

DEFAULT_BETA_TABLE = {1: 0.50, 2: 0.49, 4: 0.48, 8: 0.47, 16: 0.46}


@dataclass(frozen=True)
class TechnologyParams:
    sigma: float = 4096.0
    tau: float = 1.0
    mu: float = 0.1
    rho: float = 1.0
    beta_table: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_BETA_TABLE))
    alpha: float = 0.25
    gamma: float = 1.4
    d_dram: float = 200.0

    def __post_init__(self):
        for name in ("sigma", "tau", "rho", "d_dram", "alpha"):
            if not getattr(self, name) > 0:
                raise DomainError(f"technology.{name} must be > 0, got {getattr(self, name)}")
        if not 0 < self.mu < 1:
            raise DomainError(f"technology.mu must satisfy 0 < mu < 1, got {self.mu}")
        if not self.gamma > 1:
            raise DomainError(f"technology.gamma must be > 1 (area superlinear in size), got {self.gamma}")
        if not self.beta_table:
            raise DomainError("technology.beta_table is empty")
        for key, beta in self.beta_table.items():
            if int(key) < 1 or not beta > 0:
                raise DomainError(f"beta_table entry {key}: {beta} must have key >= 1 and beta > 0")
        # frozen dataclass: normalise the table to a sorted plain dict
        object.__setattr__(
            self, "beta_table", {int(k): float(v) for k, v in sorted(self.beta_table.items())}
        )

    def beta(self, partitions) -> np.ndarray | float:
        """Power-law exponent for a partition count (nearest lower table key)."""
        keys = np.fromiter(self.beta_table.keys(), dtype=float)
        values = np.fromiter(self.beta_table.values(), dtype=float)
        idx = np.searchsorted(keys, np.asarray(partitions, dtype=float), side="right") - 1
        out = values[np.clip(idx, 0, len(keys) - 1)]
        return float(out) if np.ndim(out) == 0 else out

    def scaled_time(self, c: float) -> "TechnologyParams":
        return replace(self, tau=self.tau * c, d_dram=self.d_dram * c)


@dataclass(frozen=True)
class WorkloadParams:
    n_cores: int = 16
    e_n: float = 0.8
    mu_n: float = 0.005

    def __post_init__(self):
        if int(self.n_cores) != self.n_cores or self.n_cores < 1:
            raise DomainError(f"workload.n_cores must be a positive integer, got {self.n_cores}")
        if not 0 < self.e_n <= 1:
            raise DomainError(f"workload.e_n must satisfy 0 < E_n <= 1, got {self.e_n}")
        # mu_n == 1 is the degenerate miss-everything limit, reachable only in tests
        if not 0 <= self.mu_n <= 1:
            raise DomainError(f"workload.mu_n must satisfy 0 <= mu_N < 1, got {self.mu_n}")


@dataclass(frozen=True)
class NocParams:
    c_transfer: float = 1.0
    k_queue: float = 2.0
    m_saturation: float = 0.5

    def __post_init__(self):
        if self.c_transfer < 0 or self.k_queue < 0:
            raise DomainError("noc.c_transfer and noc.k_queue must be >= 0")
        if not 0 < self.m_saturation <= 1:
            raise DomainError(f"noc.m_saturation must lie in (0, 1], got {self.m_saturation}")

    def scaled_time(self, c: float) -> "NocParams":
        return replace(self, c_transfer=self.c_transfer * c, k_queue=self.k_queue * c)


@dataclass(frozen=True)
class ModelParams:
    """The three parameter blocks every delay evaluation needs."""

    tech: TechnologyParams = field(default_factory=TechnologyParams)
    workload: WorkloadParams = field(default_factory=WorkloadParams)
    noc: NocParams = field(default_factory=NocParams)

    def scaled_time(self, c: float) -> "ModelParams":
        """Same model with every time constant multiplied by ``c``."""
        return ModelParams(self.tech.scaled_time(c), self.workload, self.noc.scaled_time(c))


@dataclass(frozen=True)
class HierarchyConfig:
    """A design point.  ``sizes`` are bytes; shared levels give total capacity."""

    depth: int
    sizes: Tuple[float, ...]
    partitions: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.depth not in (1, 2, 3):
            raise DomainError(f"depth must be 1, 2 or 3, got {self.depth}")
        object.__setattr__(self, "sizes", tuple(float(s) for s in self.sizes))
        object.__setattr__(self, "partitions", tuple((int(a), int(b)) for a, b in self.partitions))
        if len(self.sizes) != self.depth or len(self.partitions) != self.depth:
            raise DomainError(
                f"depth {self.depth} needs {self.depth} sizes and partitions, "
                f"got {len(self.sizes)} and {len(self.partitions)}"
            )
        for i, s in enumerate(self.sizes):
            if not s > 0:
                raise DomainError(f"sizes[{i}] must be > 0, got {s}")
        for i in range(1, self.depth):
            if not self.sizes[i] > self.sizes[i - 1]:
                raise DomainError(
                    f"inclusive hierarchy needs S_{i} < S_{i + 1}, got {self.sizes[i - 1]} >= {self.sizes[i]}"
                )
        for i, (nx, ny) in enumerate(self.partitions):
            if nx < 1 or ny < 1:
                raise DomainError(f"partitions[{i}] = ({nx}, {ny}) must be >= 1 in both directions")

    @classmethod
    def from_ratios(cls, ratios: Sequence[float], layers: Sequence[int], sigma: float):
        """Build from sizes in units of ``sigma`` and per-level layer counts (N_y = 1)."""
        return cls(len(ratios), tuple(r * sigma for r in ratios), tuple((int(n), 1) for n in layers))

    def ratios(self, sigma: float) -> np.ndarray:
        return np.asarray(self.sizes) / sigma

    def layer_counts(self) -> np.ndarray:
        return np.array([nx * ny for nx, ny in self.partitions])


@dataclass(frozen=True)
class EvalResult:
    access_times: Tuple[float, ...]
    miss_rates: Tuple[float, ...]
    shared_access_rate: float
    noc_delay: float
    noc_transfer: float
    noc_queue: float
    avg_delay: float
    total_power: float
    total_area: float


# -- vectorised kernels (sizes in units of sigma) -------------------------------

def access_time_private_arrays(ratio, partitions, tech: TechnologyParams, beta=None):
    beta = tech.beta(partitions) if beta is None else beta
    return tech.tau * (np.asarray(ratio, dtype=float) / partitions) ** beta


def access_time_shared_core(ratio, partitions, n_cores, tech: TechnologyParams, beta=None):
    """Array part of the shared access time, without the NoC addend."""
    beta = tech.beta(partitions) if beta is None else beta
    return tech.tau * (np.asarray(ratio, dtype=float) / (n_cores * partitions)) ** beta


def noc_delay_arrays(m_s, workload: WorkloadParams, noc: NocParams):
    """Transfer and congestion terms; congestion is +inf at or past saturation.

    With ``k_queue = 0`` there is no congestion term and no saturation.
    """
    m_s = np.asarray(m_s, dtype=float)
    transfer = noc.c_transfer * math.sqrt(workload.n_cores)
    if noc.k_queue == 0:
        return transfer, np.zeros_like(m_s)
    headroom = noc.m_saturation - m_s
    with np.errstate(divide="ignore", invalid="ignore"):
        queue = np.where(headroom > 0, noc.k_queue * m_s / np.where(headroom > 0, headroom, 1.0), np.inf)
    return transfer, queue


def miss_rate_arrays(depth: int, ratios, workload: WorkloadParams, tech: TechnologyParams, clamp=True):
    """Per-level miss rates and the shared access rate.

    ``ratios`` has shape (..., depth).  Non-positive effective capacities give
    an infinite raw miss rate, i.e. a clamped miss rate of 1.
    """
    s = np.asarray(ratios, dtype=float)
    mu, mu_n, e_n, n = tech.mu, workload.mu_n, workload.e_n, workload.n_cores

    def inv_sqrt(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x > 0, 1.0 / np.sqrt(np.where(x > 0, x, 1.0)), np.inf)

    if depth == 1:
        m = [mu_n + (1 - mu_n) * mu * e_n * inv_sqrt(s[..., 0])]
    elif depth == 2:
        m = [
            mu_n + (1 - mu_n) * mu * inv_sqrt(s[..., 0]),
            mu * e_n * inv_sqrt((s[..., 1] - s[..., 0]) / n),
        ]
    elif depth == 3:
        m = [
            mu_n + (1 - mu_n) * mu * inv_sqrt(s[..., 0]),
            mu_n + (1 - mu_n) * mu * inv_sqrt(s[..., 1] - s[..., 0]),
            mu * e_n * inv_sqrt((s[..., 2] - s[..., 1]) / n),
        ]
    else:
        raise DomainError(f"depth must be 1, 2 or 3, got {depth}")
    if clamp:
        m = [np.clip(mi, 0.0, 1.0) for mi in m]
    m_s = m[0] if depth <= 2 else m[0] * m[1]
    return m, m_s


@dataclass
class BatchEval:
    delay: np.ndarray
    access_times: list
    miss_rates: list
    m_s: np.ndarray
    noc_transfer: float
    noc_queue: np.ndarray
    power: np.ndarray
    area: np.ndarray


def evaluate_arrays(depth: int, ratios, layers, params: ModelParams, betas=None) -> BatchEval:
    """Evaluate ``depth``-level designs in bulk.

    ``ratios`` (sizes / sigma) and ``layers`` (N_i = N_x * N_y) have shape
    (..., depth).  ``betas`` optionally supplies the per-level exponents
    already looked up for ``layers``.  Saturated NoC points get ``delay = inf``.
    """
    tech, workload, noc = params.tech, params.workload, params.noc
    s = np.asarray(ratios, dtype=float)
    n_part = np.asarray(layers)
    m, m_s = miss_rate_arrays(depth, s, workload, tech)
    transfer, queue = noc_delay_arrays(m_s, workload, noc)
    d_noc = transfer + queue

    if betas is None:
        betas = tech.beta(n_part)
    betas = np.asarray(betas, dtype=float)
    t = [access_time_private_arrays(s[..., i], n_part[..., i], tech, betas[..., i]) for i in range(depth)]
    if depth > 1:
        t[-1] = d_noc + access_time_shared_core(
            s[..., -1], n_part[..., -1], workload.n_cores, tech, betas[..., -1]
        )

    d_dram = tech.d_dram
    with np.errstate(invalid="ignore"):
        if depth == 1:
            delay = (1 - m[0]) * t[0] + m[0] * (d_noc + d_dram)
        elif depth == 2:
            delay = (1 - m[0]) * t[0] + m[0] * (1 - m[1]) * t[1] + m[0] * m[1] * d_dram
        else:
            delay = (
                (1 - m[0]) * t[0]
                + m[0] * (1 - m[1]) * t[1]
                + m[0] * m[1] * (1 - m[2]) * t[2]
                + m[0] * m[1] * m[2] * d_dram
            )
        delay = np.where(np.isfinite(queue), delay, np.inf)
    return BatchEval(
        delay=delay,
        access_times=t,
        miss_rates=m,
        m_s=m_s,
        noc_transfer=transfer,
        noc_queue=queue,
        power=power_arrays(s, tech),
        area=area_arrays(s, tech),
    )


def power_arrays(ratios, tech: TechnologyParams):
    return tech.rho * np.sqrt(np.asarray(ratios, dtype=float)).sum(axis=-1)


def area_arrays(ratios, tech: TechnologyParams):
    return tech.alpha * (np.asarray(ratios, dtype=float) ** tech.gamma).sum(axis=-1)


# -- scalar public API ------------------------------------------------------------

def _check_partitions(n_x, n_y):
    if n_x < 1 or n_y < 1:
        raise DomainError(f"partition counts must be >= 1, got {n_x}x{n_y}")


def access_time_private(size, n_x, n_y, tech: TechnologyParams, layers_key: Optional[int] = None) -> float:
    """Access time of a private level of ``size`` bytes split into n_x * n_y partitions."""
    if not size > 0:
        raise DomainError(f"cache size must be > 0, got {size}")
    _check_partitions(n_x, n_y)
    n = n_x * n_y
    beta = tech.beta(n if layers_key is None else layers_key)
    return float(access_time_private_arrays(size / tech.sigma, n, tech, beta=beta))


def noc_delay(m_s, workload: WorkloadParams, noc: NocParams) -> float:
    """d_NoC = transfer + blocking/queuing at shared access rate ``m_s``."""
    if m_s < 0:
        raise DomainError(f"shared access rate must be >= 0, got {m_s}")
    if noc.k_queue > 0 and m_s >= noc.m_saturation:
        raise SaturationError(m_s, noc.m_saturation)
    transfer, queue = noc_delay_arrays(m_s, workload, noc)
    return float(transfer + queue)


def access_time_shared(size, n_x, n_y, workload: WorkloadParams, tech: TechnologyParams,
                       noc: NocParams, m_s: float) -> float:
    if not size > 0:
        raise DomainError(f"cache size must be > 0, got {size}")
    _check_partitions(n_x, n_y)
    core = access_time_shared_core(size / tech.sigma, n_x * n_y, workload.n_cores, tech)
    return noc_delay(m_s, workload, noc) + float(core)


def miss_rates(config: HierarchyConfig, workload: WorkloadParams, tech: TechnologyParams):
    """Return ``(per-level miss rates, shared access rate M_S)``, clamped to [0, 1]."""
    m, m_s = miss_rate_arrays(config.depth, config.ratios(tech.sigma), workload, tech)
    return tuple(float(x) for x in m), float(m_s)


def total_power(config: HierarchyConfig, tech: TechnologyParams) -> float:
    """Sum of rho * sqrt(S_j / sigma); independent of the 3D partitioning."""
    return float(power_arrays(config.ratios(tech.sigma), tech))


def total_area(config: HierarchyConfig, tech: TechnologyParams) -> float:
    return float(area_arrays(config.ratios(tech.sigma), tech))


def avg_delay(config: HierarchyConfig, params: ModelParams) -> EvalResult:
    """Evaluate every derived quantity of a design point.

    Raises SaturationError when the shared access rate saturates the NoC.
    """
    depth = config.depth
    ev = evaluate_arrays(depth, config.ratios(params.tech.sigma), config.layer_counts(), params)
    m_s = float(ev.m_s)
    if not np.isfinite(ev.noc_queue):
        raise SaturationError(m_s, params.noc.m_saturation)
    queue = float(ev.noc_queue)
    return EvalResult(
        access_times=tuple(float(t) for t in ev.access_times),
        miss_rates=tuple(float(m) for m in ev.miss_rates),
        shared_access_rate=m_s,
        noc_delay=ev.noc_transfer + queue,
        noc_transfer=ev.noc_transfer,
        noc_queue=queue,
        avg_delay=float(ev.delay),
        total_power=float(ev.power),
        total_area=float(ev.area),
    )


def objective_min(d_1, d_12, d_123) -> Tuple[float, int]:
    """Best of the three per-depth delays, ties going to the shallower hierarchy.

    ``None``, NaN or +inf marks a depth as infeasible.
    """
    best = None
    for depth, d in ((1, d_1), (2, d_12), (3, d_123)):
        if d is None or not math.isfinite(d):
            continue
        if best is None or d < best[0]:
            best = (float(d), depth)
    if best is None:
        raise NoViableConfiguration("no hierarchy depth is feasible")
    return best
