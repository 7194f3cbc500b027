"""How many absorbers does it take to catch a photon?

A single absorber on a waveguide can take at most half of the incoming flux.
Chains with a tuned spacing do better; this prints the optimum per chain
length and the shortest chain reaching 90 %.
"""

# %%
import numpy as np

from photonlink.absorber import AbsorberCoupling, chain_absorption, optimize_chain, single_absorption

# %% One absorber: 2 g / (1 + g)^2 peaks at g = 1.
for g in (0.1, 0.5, 1.0, 2.0, 10.0):
    print(f"gamma = {g:5.1f}: absorption {single_absorption(AbsorberCoupling(g)):.4f}")

# %% Two unit absorbers: spacing matters.
phases = np.linspace(0, np.pi, 7)
for ph, a in zip(phases, chain_absorption(1.0, phases, 2)):
    print(f"phase {ph:5.3f} rad: absorption {a:.4f}")

# %% Optimized homogeneous chains.
print(f"{'N':>3} {'gamma':>8} {'phase':>8} {'absorption':>11}")
first = None
for n in range(1, 21):
    opt = optimize_chain(n)
    print(f"{n:3d} {opt.best_gamma:8.4f} {opt.best_phase:8.4f} {opt.best_absorption:11.5f}")
    if first is None and opt.best_absorption >= 0.9:
        first = n
print(f"shortest chain reaching 90 %: N = {first}")
