# %% [markdown]
# # Evaluating hierarchies by hand
#
# Before optimizing anything it helps to poke at the delay model directly.
# Sizes are bytes here; the model divides by sigma (4 KB by default).

# %%
from cache3d.errors import SaturationError
from cache3d.models import HierarchyConfig, ModelParams, avg_delay

params = ModelParams()
KB = 1024

# %% [markdown]
# A single 64 KB level split over all 16 layers.  Every miss crosses the NoC
# and then goes to DRAM, which is why the delay is large.

# %%
one = HierarchyConfig(1, (64 * KB,), ((16, 1),))
r = avg_delay(one, params)
print(f"depth 1: delay {r.avg_delay:.3f}, miss {r.miss_rates[0]:.4f}, area {r.total_area:.2f}")

# %% [markdown]
# Adding a large shared level behind a private L1 catches most of those
# misses, at the price of NoC traffic on every L1 miss.

# %%
two = HierarchyConfig(2, (16 * KB, 4096 * KB), ((15, 1), (1, 1)))
r = avg_delay(two, params)
print(f"depth 2: delay {r.avg_delay:.3f}, M_S {r.shared_access_rate:.4f}, noc {r.noc_delay:.3f}")

three = HierarchyConfig(3, (4 * KB, 16 * KB, 1024 * KB), ((11, 1), (4, 1), (1, 1)))
r = avg_delay(three, params)
print(f"depth 3: delay {r.avg_delay:.3f}, M_S {r.shared_access_rate:.5f}, area {r.total_area:.2f}")

# %% [markdown]
# Shrink the private level far enough and the shared access rate reaches the
# NoC saturation point.  The model refuses to return a delay there.

# %%
tiny = HierarchyConfig(2, (64, 4096 * KB), ((1, 1), (1, 1)))
try:
    avg_delay(tiny, params)
except SaturationError as exc:
    print("saturated:", exc)

# %% [markdown]
# Power depends only on sizes, so reshuffling layers leaves it unchanged
# while moving the delay.

# %%
for parts in (((15, 1), (1, 1)), ((8, 1), (8, 1)), ((1, 1), (15, 1))):
    r = avg_delay(HierarchyConfig(2, (16 * KB, 4096 * KB), parts), params)
    print(parts, f"delay {r.avg_delay:.3f} power {r.total_power:.3f}")
