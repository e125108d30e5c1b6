"""Area-budget sweeps and their CSV form."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import Cache3DError, NoViableConfiguration
from .models import ModelParams, evaluate_arrays
from .optimizer import ConstraintSet, optimize

SWEEP_HEADER = (
    "area_budget", "winner_depth", "delay",
    "s1", "s2", "s3", "n1", "n2", "n3", "frac1", "frac2", "frac3",
    "power", "m_s", "binding",
)


@dataclass
class SweepRow:
    area_budget: float
    winner_depth: Optional[int] = None  # None: no feasible design at this budget
    delay: float = math.nan
    sizes: Tuple[float, ...] = ()  # bytes
    layers: Tuple[int, ...] = ()
    fractions: Tuple[float, ...] = ()
    power: float = math.nan
    m_s: float = math.nan
    binding: str = ""  # ';'-joined binding constraints, or the failure reason

    @property
    def feasible(self) -> bool:
        return self.winner_depth is not None

    def cells(self) -> list:
        def pad(vals, fmt):
            vals = [fmt(v) for v in vals]
            return vals + [""] * (3 - len(vals))

        if not self.feasible:
            return [repr(self.area_budget), "", ""] + [""] * 11 + [self.binding]
        return (
            [repr(self.area_budget), str(self.winner_depth), repr(self.delay)]
            + pad(self.sizes, repr) + pad(self.layers, str) + pad(self.fractions, repr)
            + [repr(self.power), repr(self.m_s), self.binding]
        )


def sweep_point(budget: float, params: ModelParams, constraints: ConstraintSet, seed: int = 0) -> SweepRow:
    """Optimise at one area budget; failures end up in the row, not raised."""
    cons = constraints.replace(a_max=budget)
    try:
        res = optimize(params, cons, seed=seed)
    except NoViableConfiguration:
        return SweepRow(budget, binding="infeasible")
    except (Cache3DError, FloatingPointError, ArithmeticError) as exc:
        return SweepRow(budget, binding=f"error: {type(exc).__name__}")
    x = res.winner
    s = np.asarray(x.sizes)
    ev = evaluate_arrays(x.depth, s, np.asarray(x.partitions), params)
    areas = params.tech.alpha * s ** params.tech.gamma
    return SweepRow(
        area_budget=budget,
        winner_depth=res.winner_depth,
        delay=res.delay,
        sizes=tuple(float(v) * params.tech.sigma for v in s),
        layers=tuple(int(n) for n in x.partitions),
        fractions=tuple(float(a) for a in areas / areas.sum()),
        power=float(ev.power),
        m_s=float(ev.m_s),
        binding=";".join(b.name for b in res.binding),
    )


def run_sweep(budgets: Sequence[float], params: ModelParams, constraints: ConstraintSet,
              seed: int = 0, workers: int = 1) -> List[SweepRow]:
    """One row per budget, in budget order whatever the completion order."""
    def one(b):
        return sweep_point(float(b), params, constraints, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, budgets))
    return [one(b) for b in budgets]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def write_sweep_csv(path, rows: Sequence[SweepRow]) -> None:
    Path(path).write_text(rows_to_csv(rows))


def read_sweep_csv(path) -> List[SweepRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SWEEP_HEADER:
            raise ValueError(f"{path}: unexpected sweep header {header}")
        rows = []
        for cells in reader:
            budget = float(cells[0])
            if not cells[1]:
                rows.append(SweepRow(budget, binding=cells[14]))
                continue
            depth = int(cells[1])
            rows.append(SweepRow(
                area_budget=budget,
                winner_depth=depth,
                delay=float(cells[2]),
                sizes=tuple(float(v) for v in cells[3:3 + depth]),
                layers=tuple(int(v) for v in cells[6:6 + depth]),
                fractions=tuple(float(v) for v in cells[9:9 + depth]),
                power=float(cells[12]),
                m_s=float(cells[13]),
                binding=cells[14],
            ))
        return rows
