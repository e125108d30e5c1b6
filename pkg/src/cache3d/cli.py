"""Command-line entry point: ``cache3d {fit,eval,optimize,sweep}``.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible problem,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import fitting
from .config import PROFILES, RunConfig, parse_config, profile_path
from .errors import Cache3DError, ConfigError, DomainError, FitError, NoViableConfiguration, SaturationError
from .models import HierarchyConfig, avg_delay
from .optimizer import optimize
from .oracle import GridSpec, compare, write_report
from .svg import write_charts
from .sweep import run_sweep, write_sweep_csv

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("cache3d")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _clean(obj):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write_json(out_dir: Path, name: str, payload) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n")
    return path


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _partitions(text):
    out = []
    for item in text.split(","):
        nx, sep, ny = item.strip().lower().partition("x")
        try:
            out.append((int(nx), int(ny) if sep else 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"partitions look like 4x1,12x1; got {item!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help=f"config file, or a shipped profile name ({', '.join(PROFILES)})")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="overrides run.seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides output.dir)")
    common.add_argument("--verify", action="store_true", default=argparse.SUPPRESS,
                        help="cross-check optimizer results against the grid-search oracle")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    p = _Parser(prog="cache3d", description="Cache hierarchy sizing for 3D-stacked multicores.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", parents=[common], help="fit power laws to a sample CSV")
    f.add_argument("samples", help="CSV with columns size_bytes,layers,value")
    f.add_argument("--kind", choices=("time", "area"), default="time")
    f.add_argument("--loss", choices=("minimax", "lsq", "abs"), default="minimax")

    e = sub.add_parser("eval", parents=[common], help="evaluate one design point")
    e.add_argument("--sizes", type=_floats, required=True, help="level sizes in bytes, e.g. 32768,1048576")
    e.add_argument("--partitions", type=_partitions, default=None,
                   help="per-level NxxNy partitions, e.g. 4x1,12x1 (default 1x1 each)")

    sub.add_parser("optimize", parents=[common], help="optimise under the configured constraints")

    s = sub.add_parser("sweep", parents=[common], help="sweep the area budget and draw charts")
    s.add_argument("--workers", type=int, default=1)
    return p


def _load_config(args) -> RunConfig:
    path = getattr(args, "config", None)
    if path is not None and not Path(path).exists() and path in PROFILES:
        path = profile_path(path)
    cfg = parse_config(path)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None) is not None:
        cfg.out_dir = Path(args.out)
    return cfg


def cmd_fit(args, cfg: RunConfig) -> int:
    samples = fitting.read_samples_csv(args.samples)
    sigma = cfg.params.tech.sigma
    if args.kind == "area":
        res = fitting.fit_area(samples, sigma) if args.loss == "minimax" else fitting.fit_power_law(
            [(s.size / sigma, s.value) for s in samples], loss=args.loss)
        print(f"alpha = {res.coefficient:.6g}  gamma = {res.exponent:.6g}  "
              f"max_rel_error = {100 * res.max_rel_error:.3f}%  (n = {res.n_samples})")
        _write_json(cfg.out_dir, "fit.json", {"kind": "area", "result": asdict(res)})
        return EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", fitting.MonotonicityWarning)
        per_layer = fitting.fit_beta_per_layers(samples, sigma)
    pooled = fitting.fit_power_law([(s.size / sigma / s.layers, s.value) for s in samples], loss=args.loss)
    print(f"pooled: tau = {pooled.coefficient:.6g}  beta = {pooled.exponent:.6g}  "
          f"max_rel_error = {100 * pooled.max_rel_error:.3f}%  (n = {pooled.n_samples})")
    print("layers  tau        beta       max_rel_error")
    for layers, r in per_layer.items():
        print(f"{layers:6d}  {r.coefficient:<9.6g}  {r.exponent:<9.6g}  {100 * r.max_rel_error:.3f}%")
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_json(cfg.out_dir, "fit.json", {
        "kind": "time",
        "pooled": asdict(pooled),
        "per_layer": {k: asdict(r) for k, r in per_layer.items()},
        "beta_table": {k: r.exponent for k, r in per_layer.items()},
    })
    return EXIT_OK


def cmd_eval(args, cfg: RunConfig) -> int:
    sizes = args.sizes
    parts = args.partitions or [(1, 1)] * len(sizes)
    try:
        point = HierarchyConfig(len(sizes), tuple(sizes), tuple(parts))
    except DomainError as exc:
        raise ConfigError(f"invalid design point: {exc}") from None
    report = {"design": {"depth": point.depth, "sizes_bytes": point.sizes, "partitions": point.partitions}}
    try:
        res = avg_delay(point, cfg.params)
    except SaturationError as exc:
        print(f"verdict: infeasible ({exc})")
        report.update(verdict="infeasible", reason=str(exc))
        _write_json(cfg.out_dir, "eval.json", report)
        return EXIT_INFEASIBLE
    usage = {"area": res.total_area, "power": res.total_power, "m_s": res.shared_access_rate}
    residuals = {k: (lim - usage[k]) / lim for k, lim in cfg.constraints.limits().items()}
    layers_used = int(point.layer_counts().sum())
    if layers_used > cfg.constraints.total_layers:
        residuals["layers"] = (cfg.constraints.total_layers - layers_used) / cfg.constraints.total_layers
    verdict = "feasible" if all(r >= 0 for r in residuals.values()) else "infeasible"

    for name, value in asdict(res).items():
        if isinstance(value, tuple):
            value = ", ".join(f"{v:.6g}" for v in value)
        else:
            value = f"{value:.6g}"
        print(f"{name:20s} {value}")
    for name, r in residuals.items():
        print(f"residual[{name}]{'':{max(0, 10 - len(name))}s} {r:+.6g}")
    print(f"verdict: {verdict}")
    report.update(result=asdict(res), residuals=residuals, verdict=verdict)
    _write_json(cfg.out_dir, "eval.json", report)
    return EXIT_OK if verdict == "feasible" else EXIT_INFEASIBLE


def _describe(x, sigma) -> str:
    sizes = ", ".join(f"{s * sigma:.6g}" for s in x.sizes)
    return f"sizes [{sizes}] bytes, layers {list(x.partitions)}"


def cmd_optimize(args, cfg: RunConfig) -> int:
    sigma = cfg.params.tech.sigma
    try:
        res = optimize(cfg.params, cfg.constraints, seed=cfg.seed)
    except NoViableConfiguration as exc:
        print(f"no viable configuration: {exc}")
        diag = {}
        for d, r in sorted(exc.diagnostics.items()):
            where = _describe(r.x, sigma) if r.x is not None else "no candidate"
            print(f"  depth {d}: least-infeasible point violates budgets by {r.violation:.4g} (relative); {where}")
            diag[d] = {"violation": r.violation, "x": None if r.x is None else asdict(r.x)}
        _write_json(cfg.out_dir, "optimize.json", {"feasible": False, "diagnostics": diag})
        if getattr(args, "verify", False):
            rows = compare(None, cfg.params, cfg.constraints, GridSpec())
            write_report(cfg.out_dir / "verify.csv", rows)
            if any(r.flag for r in rows):
                print("verify: oracle found a feasible point the optimizer missed")
                return EXIT_NUMERIC
        return EXIT_INFEASIBLE

    print(f"winner: depth {res.winner_depth}, delay {res.delay:.6g}")
    print(f"  {_describe(res.winner, sigma)}")
    for d, r in sorted(res.per_depth.items()):
        status = f"delay {r.delay:.6g}" if r.feasible else "infeasible"
        print(f"  depth {d}: {status}")
    if res.binding:
        print("binding: " + ", ".join(f"{b.name} ({b.usage:.6g} of {b.limit:.6g})" for b in res.binding))
    else:
        print("binding: none")
    print(f"stationarity residual: {res.stationarity:.3g}")
    payload = {"feasible": True, **res.to_dict()}
    code = EXIT_OK
    if getattr(args, "verify", False):
        rows = compare(res, cfg.params, cfg.constraints, GridSpec())
        write_report(cfg.out_dir / "verify.csv", rows)
        for r in rows:
            gap = "n/a" if math.isnan(r.rel_gap) else f"{100 * r.rel_gap:+.3f}%"
            print(f"verify depth {r.depth}: optimizer {r.opt_delay:.6g} oracle {r.oracle_delay:.6g} "
                  f"gap {gap}{'  FLAGGED' if r.flag else ''}")
        payload["verify"] = [asdict(r) for r in rows]
        if any(r.flag for r in rows):
            code = EXIT_NUMERIC
    _write_json(cfg.out_dir, "optimize.json", payload)
    return code


def cmd_sweep(args, cfg: RunConfig) -> int:
    budgets = cfg.sweep.budgets()
    rows = run_sweep(budgets, cfg.params, cfg.constraints, seed=cfg.seed, workers=args.workers)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(cfg.out_dir / "sweep.csv", rows)
    charts = write_charts(cfg.out_dir, rows, cfg.constraints.total_layers)
    for r in rows:
        if r.feasible:
            print(f"area {r.area_budget:10.4g}  depth {r.winner_depth}  delay {r.delay:.5g}  "
                  f"layers {list(r.layers)}  binding {r.binding or '-'}")
        else:
            print(f"area {r.area_budget:10.4g}  {r.binding}")
    print(f"wrote {cfg.out_dir / 'sweep.csv'} and {', '.join(p.name for p in charts)}")
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "eval": cmd_eval, "optimize": cmd_optimize, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"cache3d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    level = logging.INFO if getattr(args, "verbose", 0) else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, FitError) as exc:
        print(f"cache3d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"cache3d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cache3d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Cache3DError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"cache3d: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
