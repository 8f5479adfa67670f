# %% [markdown]
# # Entanglement certificates
#
# Chain the diagnostics: residual report, qubit pairs, a good subset, and the
# measured entropy next to the continuity lower bound.

# %%
import numpy as np

from xorrigid import certify_entropy, detuned_slofstra, fannes_lower_bound, slofstra_strategy

# %%
print(certify_entropy(slofstra_strategy(6), 6).to_dict())

# %%
for t in np.linspace(0, 0.2, 5):
    c = certify_entropy(detuned_slofstra(6, t), 6)
    print(f"t={t:.2f}  eps={c.epsilon:.3e}  entropy={c.entropyBits:.4f}  eta={c.eta:.3e}")

# %%
for delta in (1e-3, 1e-2, 5e-2):
    print(f"r=3 delta={delta}: bound {fannes_lower_bound(3, delta):.4f}")
