# %% [markdown]
# # How well does a random sample see the tangent space?
#
# Draw m entries with replacement and compare the rescaled sampling
# operator restricted to T with the identity on T.  The deviation shrinks
# like 1/sqrt(m); the theoretical bound tracks it from above.

# %%
from mclab import (
    TangentSpace, coherence_profile, make_random_low_rank, near_isometry_bound,
    sample_with_replacement, superop_deviation_norm, verify,
)

n, r, beta = 20, 2, 2.0
f = make_random_low_rank(n, n, r, "haar", seed=0)
ts = TangentSpace.from_factorization(f)
mu0 = coherence_profile(f).mu0

# %%
print("    m   deviation   bound")
for m in (500, 2000, 8000, 32000):
    dev = superop_deviation_norm(ts, sample_with_replacement(n, n, m, seed=m))
    print(f"{m:5d}   {dev:9.3f}   {near_isometry_bound(n, n, r, mu0, beta, m):6.3f}")

# %% [markdown]
# The full Monte-Carlo battery: every bound is compared with its stated
# failure probability over many seeds.

# %%
for rep in verify.default_suite(n, n, r, beta, trials=200, seed=0):
    print(f"{rep.bound_name:22s} empirical {rep.empirical_exceed_frequency:.3f}"
          f"  tail {rep.theoretical_tail:.3f}  {rep.verdict}")
