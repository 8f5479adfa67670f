# %% [markdown]
# # Slofstra's strategy for CHSH(n)
#
# Alice plays anti-commuting Clifford generators; Bob's observables mix pairs of
# them. Bias is sqrt(2)/2 for every n while the entanglement grows as n/2 ebits.

# %%
from xorrigid import bias_of, chsh_n, entanglement_entropy, simulate_rounds, slofstra_strategy

# %%
for n in range(2, 9):
    s = slofstra_strategy(n)
    b = bias_of(s, chsh_n(n))
    print(f"n={n}: bias {b.bias:.12f}  win {b.successProbability:.10f}  entropy {entanglement_entropy(s.state):.3f} bits")

# %% [markdown]
# Playing actual referee rounds (seeded).

# %%
s = slofstra_strategy(4)
p, se = simulate_rounds(s, chsh_n(4), 200_000, seed=1, partitions=4)
print(f"empirical {p:.4f} +- {se:.4f}")
