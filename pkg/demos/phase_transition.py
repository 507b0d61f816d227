# %% [markdown]
# # Recovery phase transition
#
# Fraction of random rank-2 40x40 matrices recovered exactly by
# nuclear-norm minimization, as the number of uniformly sampled entries
# grows.  Below roughly n log n entries some row or column goes unseen and
# recovery is impossible.

# %%
import math

from mclab import config_from_dict, run_phase_sweep

n = 40
cfg = config_from_dict({
    "n1": n, "n2": n, "r": 2, "trials": 10, "seed": 0,
    "m_grid": [math.floor(n * math.log(n)), 320, 480, 640, 800, 1000, 1600],
})

# %%
for p in run_phase_sweep(cfg):
    bar = "#" * round(20 * p.success_rate)
    print(f"m = {p.m:5d}  {p.success_rate:4.2f}  {bar}")
