"""Analytical sizing of cache hierarchies on 3D-stacked multicores.

Models delay, power and area of one-, two- and three-level hierarchies,
fits the underlying power laws to timing tables, and searches the design
space under area, power and NoC budgets.
"""
from .config import RunConfig, SweepSpec, load_profile, parse_config
from .errors import (
    Cache3DError,
    ConfigError,
    DomainError,
    FitError,
    NoViableConfiguration,
    SaturationError,
)
from .fitting import FitResult, Sample, fit_area, fit_beta_per_layers, fit_power_law
from .models import (
    EvalResult,
    HierarchyConfig,
    ModelParams,
    NocParams,
    TechnologyParams,
    WorkloadParams,
    avg_delay,
    objective_min,
)
from .optimizer import ConstraintSet, OptimizationResult, OptVector, optimize, optimize_depth
from .oracle import GridSpec, compare, grid_search
from .sweep import SweepRow, run_sweep

__version__ = "0.1.0"
