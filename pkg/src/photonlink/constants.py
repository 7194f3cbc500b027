"""Physical constants (CODATA 2018 exact values) shared by every module."""

PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * 3.141592653589793)
BOLTZMANN = 1.380649e-23  # J / K
ELEMENTARY_CHARGE = 1.602176634e-19  # C
