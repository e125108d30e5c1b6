# %% [markdown]
# # Sweeping the area budget
#
# Each shipped profile sets up a different regime.  Sweeping the area budget
# shows how the best hierarchy changes shape as more silicon becomes
# available.  Results and charts land in demo_output/<profile>/.
#
# This takes a couple of minutes: every point is a full optimization.

# %%
from pathlib import Path

from cache3d.config import load_profile
from cache3d.svg import write_charts
from cache3d.sweep import run_sweep, write_sweep_csv

OUT = Path("demo_output")


def sweep(name, points=None):
    cfg = load_profile(name)
    budgets = cfg.sweep.budgets()
    if points:
        budgets = budgets[:: max(1, len(budgets) // points)]
    rows = run_sweep(budgets, cfg.params, cfg.constraints, seed=cfg.seed)
    out = OUT / name
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out / "sweep.csv", rows)
    write_charts(out, rows, cfg.constraints.total_layers)
    print(name)
    for r in rows:
        label = f"depth {r.winner_depth} delay {r.delay:.3f} layers {list(r.layers)}" if r.feasible else r.binding
        print(f"  area {r.area_budget:8.3g}  {label}")
    return rows


# %% [markdown]
# Area only: one level while area is scarce, then two, then three.

# %%
sweep("default")

# %% [markdown]
# Tight power: the hierarchy deepens, then a single big level takes over
# once power rather than area is the limit.

# %%
sweep("tight_power")

# %% [markdown]
# Tight NoC budget: nothing fits at small areas, and the first design that
# does is a three-level one.

# %%
sweep("noc_limited")
sweep("combined", points=8)
