# %% [markdown]
# # Solving an XOR game and lifting the vectors to observables
#
# The vector relaxation gives the exact quantum bias of an XOR game. We solve it
# for CHSH(n), compare with the spectral upper bound, and turn the vectors
# into operators on a maximally entangled state.

# %%
import numpy as np

from xorrigid import bias_of, certify_upper, chsh_n, solve_bias, tsirelson_lift
from xorrigid.game import XorGame

# %%
for n in range(2, 7):
    g = chsh_n(n)
    v = solve_bias(g)
    print(f"CHSH({n}): value {v.objective:.10f}  upper bound {certify_upper(g):.4f}  sweeps {v.sweeps}")

# %% [markdown]
# The lifted strategy reproduces the relaxation value exactly.

# %%
g = XorGame.normalized(np.random.default_rng(0).standard_normal((3, 4)))
v = solve_bias(g)
s = tsirelson_lift(v)
print("relaxation", v.objective)
print("quantum   ", bias_of(s, g).bias, "local dim", s.dimA)
