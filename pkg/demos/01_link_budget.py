"""Photon budget of a weak microwave link.

Converts received power and antenna temperature into the mean number of
signal and background photons per slot, before and after capture thinning.
"""

# %%
import numpy as np

from photonlink import LinkBudget, slot_statistics

# %% A few operating points at 5 GHz with 1 ms slots.
print(f"{'power dBm':>10} {'temp K':>8} {'signal':>10} {'background':>11} {'on':>10} {'off':>10}")
for power in (-160.0, -152.0, -145.0):
    for temp in (300.0, 0.05):
        s = slot_statistics(LinkBudget(power, 5e9, 1e-3, temp, capture_prob=0.9))
        print(f"{power:10.1f} {temp:8.2f} {s.lambda_sig:10.3f} {s.lambda_bg:11.3f} "
              f"{s.mean_on:10.3f} {s.mean_off:10.3f}")

# %% Thermal background is Rayleigh-Jeans: linear in temperature, flat in frequency.
temps = np.array([0.05, 1.0, 4.0, 77.0, 300.0])
bg = [slot_statistics(LinkBudget(-150.0, 5e9, 1e-3, t)).lambda_bg for t in temps]
for t, b in zip(temps, bg):
    print(f"T = {t:7.2f} K -> {b:10.4f} background photons per slot")
