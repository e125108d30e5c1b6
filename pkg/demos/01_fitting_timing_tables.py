# %% [markdown]
# # Fitting access-time tables
#
# Timing tools report access time for a handful of cache sizes and stack
# heights.  The optimizer wants two numbers per stack height instead: a
# coefficient tau and an exponent beta in t = tau * (S / sigma / N) ** beta.
# Here we make a synthetic table, add some measurement noise, and fit it.

# %%
import numpy as np

from cache3d.fitting import fit_beta_per_layers, fit_power_law, generate_synthetic_samples
from cache3d.models import TechnologyParams

tech = TechnologyParams()
samples = generate_synthetic_samples(tech, noise_pct=0.02, seed=1)
print(len(samples), "samples, e.g.", samples[:3])

# %% [markdown]
# One fit per layer count.  The minimax loss keeps the worst point within the
# noise band instead of averaging it away.

# %%
fits = fit_beta_per_layers(samples)
for layers, fit in fits.items():
    print(f"{layers:2d} layers: tau={fit.coefficient:.4f} beta={fit.exponent:.4f} "
          f"worst error {100 * fit.max_rel_error:.2f}%  (true beta {tech.beta(layers):.2f})")

# %% [markdown]
# The other losses are there for comparison.  Least squares on relative
# residuals has a better average but a worse worst case.

# %%
group = [(s.size / tech.sigma, s.value) for s in samples if s.layers == 1]
for loss in ("lsq", "abs", "minimax"):
    fit = fit_power_law(group, loss=loss)
    print(f"{loss:8s} beta={fit.exponent:.5f} worst={100 * fit.max_rel_error:.3f}%")

# %% [markdown]
# The fitted exponents drop into a beta table ready for a config file.

# %%
print("technology.beta_table = " + ", ".join(f"{k}:{f.exponent:.3f}" for k, f in fits.items()))
