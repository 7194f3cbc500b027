"""Achievable rate of photon-counting on-off keying versus received power.

Hard decisions use the best threshold and prior at each power; soft decisions
keep the raw count. The 0.95-bit crossing is reported for a warm and a
millikelvin antenna.
"""

# %%
import numpy as np

from photonlink._sweep import crossing_power
from photonlink.poisson_channel import rate_curve
from photonlink.radiometry import LinkBudget

powers = np.arange(-180.0, -140.0, 0.5)

# %%
for temp in (300.0, 0.05):
    budgets = [LinkBudget(p, 5e9, 1e-3, temp, 0.9) for p in powers]
    hard = rate_curve(budgets, "hard")
    soft = rate_curve(budgets, "soft")
    h = [r.rate_bits for r in hard]
    s = [r.rate_bits for r in soft]
    print(f"T = {temp} K: 0.95-bit crossing hard {crossing_power(powers, h):.2f} dBm, "
          f"soft {crossing_power(powers, s):.2f} dBm")
    for r_h, r_s in list(zip(hard, soft))[::10]:
        print(f"  {r_h.power_dbm:7.1f} dBm  hard {r_h.rate_bits:.4f} (M={r_h.threshold})  soft {r_s.rate_bits:.4f}")

# %% Optional figure.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for temp in (300.0, 0.05):
        budgets = [LinkBudget(p, 5e9, 1e-3, temp, 0.9) for p in powers]
        plt.plot(powers, [r.rate_bits for r in rate_curve(budgets)], label=f"{temp} K")
    plt.xlabel("received power (dBm)")
    plt.ylabel("rate (bits/slot)")
    plt.legend()
    plt.savefig("poisson_rate_curve.png", dpi=120)
    print("wrote poisson_rate_curve.png")
