"""The uncoupled, equal-mass limit: the channel is a pure phase rotation.

Each amplitude A[a, b, a, b](t) is exp(-i omega_x (b - a) t); everything else
vanishes exactly, and the Choi spectrum is (2, 0, 0, 0).

    python demos/identity_limit.py
"""
import numpy as np
from mpmath import mp, mpf

from oscillator_channel.amplitudes import amplitudes_at
from oscillator_channel.channel import build_choi, spectral
from oscillator_channel.cli import build_pipeline, parse_config

pipe = build_pipeline(parse_config("k = 0\nm_y = 1e-6\nN_prime = none"))
mp.prec = 256
t = mpf("1.5e-6")
amp = amplitudes_at(t, pipe.sums, pipe.frame)
for a, b in ((0, 0), (0, 1), (1, 3)):
    expected = mp.exp(-1j * pipe.frame.omega_x * (b - a) * t)
    print(f"A[{a},{b},{a},{b}] = {mp.nstr(amp[a, b, a, b], 12)}   expected {mp.nstr(expected, 12)}")
print("stray entries:", sum(1 for idx, v in np.ndenumerate(amp.values) if v and (idx[0], idx[1]) != (idx[2], idx[3])))
print("Choi eigenvalues:", [mp.nstr(x, 6) for x in spectral(build_choi(amp)).eigenvalues])
