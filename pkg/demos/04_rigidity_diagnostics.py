# %% [markdown]
# # How far is a near-optimal strategy from anti-commuting?
#
# Detune Slofstra's strategy (Schmidt angle and a small tilt of Alice's
# observables) and watch the anti-commutator residual track sqrt(eps).

# %%
import numpy as np

from xorrigid import build_qubit_pairs, detuned_slofstra, embedded_chsh_report

# %%
eps, res = [], []
for t in np.geomspace(6e-4, 0.06, 7):
    r = embedded_chsh_report(detuned_slofstra(4, t), 4)
    eps.append(r.epsilon)
    res.append(r.averages["aliceAnticomm"])
    print(f"t={t:.1e}  eps={r.epsilon:.2e}  anticomm={res[-1]:.2e}  ratio={res[-1] / np.sqrt(r.epsilon):.3f}")
print("log-log slope", np.polyfit(np.log(eps), np.log(res), 1)[0])

# %% [markdown]
# Exactly anti-commuting qubit pairs, built from triples of Alice's observables.

# %%
q = build_qubit_pairs(detuned_slofstra(6, 0.02), 6)
for key, val in q.residuals.items():
    print(f"{key:18s} {val:.3e}")
