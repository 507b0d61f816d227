# %% [markdown]
# # Coherence and the tangent-space projection
#
# How "spread out" are the singular vectors of a low-rank matrix, and how
# much of a single entry does the tangent space at that matrix capture?

# %%
import numpy as np

from mclab import (
    TangentSpace, coherence_profile, make_random_low_rank, project_T, pt_basis_norm_sq_all,
)

n1, n2, r = 30, 40, 3

# %% [markdown]
# Three generators: Haar-random factors, a bounded-entry basis and a
# "spiky" matrix whose first left singular vector is a coordinate vector.

# %%
for model in ("haar", "bounded-entry", "spiky"):
    f = make_random_low_rank(n1, n2, r, model, seed=0)
    prof = coherence_profile(f)
    print(f"{model:14s} mu0 = {prof.mu0:6.2f}   mu1 = {prof.mu1:6.2f}")

# %% [markdown]
# The spiky matrix reaches the maximal coherence n1/r.  For every cell
# (a, b) the squared norm of the projected basis matrix stays below
# mu0 r (n1 + n2) / (n1 n2).

# %%
f = make_random_low_rank(n1, n2, r, "haar", seed=0)
ts = TangentSpace.from_factorization(f)
norms = pt_basis_norm_sq_all(ts)
limit = coherence_profile(f).mu0 * r * (n1 + n2) / (n1 * n2)
print(f"largest ||P_T(e_a e_b^T)||_F^2 = {norms.max():.4f}, limit {limit:.4f}")

# %% [markdown]
# P_T is an orthogonal projector: applying it twice changes nothing.

# %%
Z = np.random.default_rng(1).standard_normal((n1, n2))
print("idempotence error:", np.abs(project_T(ts, project_T(ts, Z)) - project_T(ts, Z)).max())
