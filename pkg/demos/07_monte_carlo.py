"""Monte Carlo check of the analytic link results.

Simulates the best hard-decision link at -152 dBm and compares the empirical
error rate and plug-in rate with the analytic values, then repeats the run on
several worker counts to show the result does not depend on scheduling.
"""

# %%
from photonlink.hbt_channel import HbtChannelParams
from photonlink.poisson_channel import optimize_hard_decision
from photonlink.radiometry import LinkBudget, SlotStatistics, slot_statistics
from photonlink.simulator import SimConfig, run_simulation

stats = slot_statistics(LinkBudget(-152.0, 5e9, 1e-3, 300.0, 0.9))
best = optimize_hard_decision(stats)
cfg = SimConfig(stats, prior_one=best.prior_one, detector="threshold", threshold=best.threshold,
                n_symbols=200_000, seed=2024)

# %%
rep = run_simulation(cfg)
print(f"threshold {best.threshold}, prior {best.prior_one:.4f}")
print(f"error rate: empirical {rep.empirical_error_rate:.5f} CI {tuple(round(x, 5) for x in rep.error_ci)}, "
      f"analytic {rep.analytic_error_rate:.5f}")
print(f"rate: plug-in {rep.empirical_mi_estimate:.4f} bits, analytic {best.rate_bits:.4f} bits")

# %% Same seed, different worker counts.
same = all(run_simulation(cfg, workers=w).same_as(rep) for w in (1, 2, 4))
print("identical across worker counts:", same)

# %% The coincidence receiver with MAP detection.
hbt = SimConfig(SlotStatistics(6.0, 4.0), channel_kind="hbt",
                hbt_params=HbtChannelParams((0.25, 0.25, 0.25), (0.36, 0.07, 0.07)),
                n_symbols=100_000, seed=7)
r = run_simulation(hbt)
print(f"HBT MAP error: empirical {r.empirical_error_rate:.5f}, analytic {r.analytic_error_rate:.5f}")
