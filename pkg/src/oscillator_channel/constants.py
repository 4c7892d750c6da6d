"""Physical constants (CODATA 2018; both are exact in the 2019 SI)."""
from mpmath import mp, mpf

PLANCK = "6.62607015e-34"  # J s
BOLTZMANN = "1.380649e-23"  # J / K


def hbar():
    """Reduced Planck constant at the current working precision."""
    return mpf(PLANCK) / (2 * mp.pi)


def k_b():
    return mpf(BOLTZMANN)
