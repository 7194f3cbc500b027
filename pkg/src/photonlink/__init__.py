"""Photon-level microwave link models with superconducting detectors.

Submodules
----------
radiometry       received power and antenna temperature to per-slot photon means
absorber         transfer-matrix absorber chains and counter efficiency
poisson_channel  thinned-Poisson OOK channel, hard and soft decision rates
hbt_channel      dual-path (HBT) three-outcome channel rates
reconstruction   moment inversion, Wigner synthesis, dual-path recursion
mixture          Poisson mixtures and EM fitting
simulator        Monte Carlo validation of the analytic channels
cli              command-line front end
"""

__version__ = "0.1.0"

from .radiometry import LinkBudget, SlotStatistics, dbm_to_watts, slot_statistics, watts_to_dbm

__all__ = [
    "__version__",
    "LinkBudget",
    "SlotStatistics",
    "dbm_to_watts",
    "watts_to_dbm",
    "slot_statistics",
]
