"""Rate of the two-branch coincidence receiver.

Coherent and thermal photons split differently over the 00/01/10 outcomes,
which lets the receiver separate signal from background even when the total
count alone is ambiguous.
"""

# %%
import numpy as np

from photonlink._sweep import crossing_power
from photonlink.hbt_channel import HbtChannelParams, hbt_rate_curve
from photonlink.radiometry import LinkBudget

template = HbtChannelParams((0.25, 0.25, 0.25), (0.36, 0.07, 0.07))

# %%
for temp, powers in ((300.0, np.arange(-164.0, -148.0, 1.0)), (0.05, np.arange(-176.0, -160.0, 1.0))):
    pts = hbt_rate_curve([LinkBudget(p, 3.8e9, 1e-3, temp) for p in powers], template)
    rates = [p.rate_bits for p in pts]
    print(f"T = {temp} K: 0.95-bit crossing at {crossing_power(powers, rates):.2f} dBm")
    for p in pts[::3]:
        print(f"  {p.power_dbm:7.1f} dBm  prior {p.prior_one:.3f}  rate {p.rate_bits:.4f}")

# %% Without coherent registrations there is nothing to detect.
dark = HbtChannelParams((0.0, 0.0, 0.0), (0.36, 0.07, 0.07))
print("zero coherent probabilities:", [p.rate_bits for p in hbt_rate_curve([LinkBudget(-150.0, 3.8e9, 1e-3, 300.0)], dark)])
