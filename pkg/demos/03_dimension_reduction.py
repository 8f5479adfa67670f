# %% [markdown]
# # Randomized dimension reduction
#
# Project a strategy's vectors to C^d, twist the phases, and realify. The mean
# bias kept is at least a (1 - 1/d) fraction; the best draw becomes a strategy
# in local dimension 2^d.

# %%
import numpy as np

from xorrigid import bias_of, chsh_n, reduce_to_quantum, reduce_trials, slofstra_strategy
from xorrigid.rounding import mean_objective

g, s = chsh_n(2), slofstra_strategy(2)
opt = np.sqrt(2) / 2

# %%
for d in (1, 2, 4, 8, 16):
    mean, se = mean_objective(reduce_trials(s, g, d, 2000, seed=0))
    print(f"d={d:2d}: mean {mean:.4f} +- {se:.4f}   (1-1/d)*opt = {(1 - 1 / d) * opt:.4f}")

# %%
q = reduce_to_quantum(s, g, 2, 200, seed=0)
print("reduced dimension", q.dimA, "bias", bias_of(q, g).bias)
