"""Fit the height dependence of theta_n and rho_n from moving ratios.

Run: python3 notebooks/05_fitting.py
"""

from ranklab.estimators import fit_rho, fit_theta, moving_series
from ranklab.rank_model import DEFAULT_PARAMS
from ranklab.simulator import SimConfig, simulate_sequence

data = simulate_sequence(SimConfig(max_height=3 * 10**7, seed=5))
window = 10**6

# rho_2(X) = D X^-f: a weighted straight line in log-log coordinates.
points = [p for p in moving_series(data, "rho", 2, window) if p.X >= 1 and 0 < p.value < 1]
D, f, res = fit_rho(points, 2)
print(f"rho_2: D = {D:.4f}, f = {f:.4f} (generated with {DEFAULT_PARAMS.rho[2]}), rms {res:.3g}")

# theta_1(X) = s_1 / (1 + C X^-e) with s_1 held fixed.
points = [p for p in moving_series(data, "theta", 1, window) if p.X >= 1]
C, e, res = fit_theta(points, 1, DEFAULT_PARAMS.s[1])
print(f"theta_1: C = {C:.4f}, e = {e:.4f} (generated with {DEFAULT_PARAMS.theta[1]}), rms {res:.3g}")

# Heights up to 3e7 cover a narrow stretch of log X, so the two constants
# trade off against each other.
