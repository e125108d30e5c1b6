# %% [markdown]
# # Optimizing under budgets
#
# The optimizer tries every depth and every way of dealing the 16 layers out
# to the levels, then keeps the fastest design that fits the budgets.

# %%
from cache3d.errors import NoViableConfiguration
from cache3d.models import ModelParams
from cache3d.optimizer import ConstraintSet, optimize
from cache3d.oracle import GridSpec, compare

params = ModelParams()


def show(res):
    sizes = ", ".join(f"{s * params.tech.sigma / 1024:.1f}K" for s in res.winner.sizes)
    binding = ", ".join(b.name for b in res.binding) or "none"
    print(f"depth {res.winner_depth}  delay {res.delay:.4f}  sizes [{sizes}]  "
          f"layers {list(res.winner.partitions)}  binding {binding}")


# %% [markdown]
# Without budgets the deepest hierarchy wins, and the shared level keeps a
# single layer.

# %%
free = optimize(params, ConstraintSet())
show(free)
print("KKT residual", f"{free.stationarity:.1e}")

# %% [markdown]
# Area budgets pull the answer back toward shallower hierarchies.

# %%
for a_max in (0.4, 0.65, 2.0, 20.0):
    print(f"a_max={a_max:5}: ", end="")
    show(optimize(params, ConstraintSet(a_max=a_max)))

# %% [markdown]
# When nothing fits, the error carries the least-infeasible point per depth.

# %%
try:
    optimize(params, ConstraintSet(a_max=0.1))
except NoViableConfiguration as exc:
    for depth, r in exc.diagnostics.items():
        print(f"depth {depth}: over budget by {100 * r.violation:.0f}%")

# %% [markdown]
# Cross-check one answer against the brute-force grid search.

# %%
cons = ConstraintSet(a_max=3.0, p_max=10.0)
res = optimize(params, cons)
for row in compare(res, params, cons, GridSpec(refinement_rounds=3)):
    print(f"depth {row.depth}: optimizer {row.opt_delay:.5f} grid {row.oracle_delay:.5f} "
          f"gap {100 * row.rel_gap:+.3f}%")
