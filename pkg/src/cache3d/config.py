"""Flat ``section.key = value`` run configuration.

Example::

    # tight power budget
    constraints.p_max = 4.0
    technology.beta_table = 1:0.50, 2:0.49, 4:0.48, 8:0.47, 16:0.46
    sweep.points = 24

Blank lines and ``#`` comments are ignored.  Keys that are not set fall back
to the default profile; each fallback is logged with its provenance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from importlib import resources

from .errors import ConfigError, DomainError
from .models import DEFAULT_BETA_TABLE, ModelParams, NocParams, TechnologyParams, WorkloadParams
from .optimizer import ConstraintSet

log = logging.getLogger(__name__)

NONE_WORDS = {"none", "null", "off", ""}

# key -> (default, parser, provenance)
_SPEC = {
    "technology.sigma": (4096.0, float, "profile default"),
    "technology.tau": (1.0, float, "profile default"),
    "technology.mu": (0.1, float, "profile default"),
    "technology.rho": (1.0, float, "profile default"),
    "technology.beta_table": (dict(DEFAULT_BETA_TABLE), "beta_table", "published (range 0.4-0.6)"),
    "technology.alpha": (0.25, float, "published"),
    "technology.gamma": (1.4, float, "published (range 1.35-1.45)"),
    "technology.d_dram": (200.0, float, "profile default"),
    "workload.n_cores": (16, int, "profile default"),
    "workload.e_n": (0.8, float, "profile default"),
    "workload.mu_n": (0.005, float, "profile default"),
    "noc.c_transfer": (1.0, float, "profile default"),
    "noc.k_queue": (2.0, float, "profile default"),
    "noc.m_saturation": (0.5, float, "profile default"),
    "constraints.a_max": (None, "optional", "profile default"),
    "constraints.p_max": (None, "optional", "profile default"),
    "constraints.m_s_max": (None, "optional", "profile default"),
    "constraints.total_layers": (16, int, "published"),
    "sweep.a_min": (0.3, float, "profile default"),
    "sweep.a_max": (1000.0, float, "profile default"),
    "sweep.points": (16, int, "profile default"),
    "sweep.spacing": ("log", "spacing", "profile default"),
    "output.dir": ("out", str, "profile default"),
    "run.seed": (0, int, "profile default"),
}

PROFILES = ("default", "tight_power", "noc_limited", "combined")


@dataclass(frozen=True)
class SweepSpec:
    a_min: float = 0.3
    a_max: float = 1000.0
    points: int = 16
    spacing: str = "log"

    def __post_init__(self):
        if not 0 < self.a_min < self.a_max:
            raise DomainError(f"sweep range must satisfy 0 < a_min < a_max, got {self.a_min}, {self.a_max}")
        if self.points < 2:
            raise DomainError(f"sweep.points must be >= 2, got {self.points}")
        if self.spacing not in ("log", "linear"):
            raise DomainError(f"sweep.spacing must be 'log' or 'linear', got {self.spacing!r}")

    def budgets(self):
        import numpy as np

        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.a_min, self.a_max, self.points)]
        return [float(v) for v in np.linspace(self.a_min, self.a_max, self.points)]


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    constraints: ConstraintSet = field(default_factory=ConstraintSet)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    out_dir: Path = Path("out")
    seed: int = 0
    provenance: Dict[str, str] = field(default_factory=dict)


def _parse_beta_table(text: str) -> dict:
    table = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        k, sep, v = item.partition(":")
        if not sep:
            raise ValueError(f"beta_table entries look like 'layers:beta', got {item!r}")
        table[int(k)] = float(v)
    if not table:
        raise ValueError("beta_table is empty")
    return table


def _convert(kind, text: str):
    if kind == "beta_table":
        return _parse_beta_table(text)
    if kind == "optional":
        return None if text.lower() in NONE_WORDS else float(text)
    if kind == "spacing":
        return text.lower()
    if kind is int:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {text!r}")
        return int(value)
    value = kind(text)
    if kind is float and not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def parse_text(text: str, source: str = "<config>") -> RunConfig:
    values = {}
    unknown = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw.strip()!r}")
        if key not in _SPEC:
            unknown.append(f"{key} (line {lineno})")
            continue
        try:
            values[key] = _convert(_SPEC[key][1], value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    if unknown:
        raise ConfigError(f"{source}: unknown keys: {', '.join(unknown)}")

    provenance = {}
    for key, (default, _, origin) in _SPEC.items():
        if key in values:
            provenance[key] = "config"
        else:
            values[key] = default
            provenance[key] = origin
            log.info("%s = %r (%s)", key, default, origin)

    def block(prefix):
        return {k.split(".", 1)[1]: v for k, v in values.items() if k.startswith(prefix + ".")}

    try:
        params = ModelParams(
            TechnologyParams(**block("technology")),
            WorkloadParams(**block("workload")),
            NocParams(**block("noc")),
        )
        constraints = ConstraintSet(**block("constraints"))
        sweep = SweepSpec(**block("sweep"))
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return RunConfig(params, constraints, sweep, Path(values["output.dir"]), values["run.seed"], provenance)


def parse_config(path: Optional[str | Path]) -> RunConfig:
    """Load a configuration file; ``None`` gives the full default profile."""
    if path is None:
        return parse_text("", "<defaults>")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_text(text, str(path))


def profile_path(name: str) -> Path:
    """Path of a shipped profile (``default``, ``tight_power``, ``noc_limited``, ``combined``)."""
    if name not in PROFILES:
        raise ConfigError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}")
    return Path(str(resources.files("cache3d") / "profiles" / f"{name}.cfg"))


def load_profile(name: str) -> RunConfig:
    return parse_config(profile_path(name))
