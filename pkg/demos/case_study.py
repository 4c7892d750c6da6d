"""Walk through the default microgram-scale case study.

Derives the normal-mode frame, reports the error budget, then follows the
qubit through a short time sweep: Choi spectrum, leakage and recovery.

    python demos/case_study.py
"""
from mpmath import mp

from oscillator_channel.cli import build_pipeline, parse_config, sweep_rows

config = parse_config("steps = 10")
pipe = build_pipeline(config)
mp.prec = config.precision_bits

f = pipe.frame
print("renormalized frequencies:", mp.nstr(f.omega_x, 15), mp.nstr(f.omega_y, 15))
print("normal modes:            ", mp.nstr(f.omega_u, 15), mp.nstr(f.omega_v, 15))
print("mixing angle theta:      ", mp.nstr(f.theta, 10))
print("coordinate map (u1, u2, v1, v2):", [mp.nstr(c, 8) for c in f.coefficients])

b = pipe.budget
print("\nerror budget per amplitude")
print("  theorem1_bound  ", mp.nstr(b.epsilon, 8))
print("  remark3_bound   ", mp.nstr(b.epsilon_refined, 8), "(used as eps)")

print("\n   t [s]      lambda1    leakage_lb   f_BK_lb    trace(rho_mixed)")
for row in sweep_rows(pipe):
    print(f"  {mp.nstr(row['t'], 3):>8}  {mp.nstr(row['lambda1'], 8):>10}  {mp.nstr(row['leakage_lb'], 6):>10}"
          f"  {mp.nstr(row['f_BK_lb'], 6):>9}  {mp.nstr(row['trace'], 10)}")
