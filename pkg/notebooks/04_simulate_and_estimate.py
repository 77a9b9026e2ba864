"""Simulate test curves and read the model back from the data.

Run: python3 notebooks/04_simulate_and_estimate.py
"""

from ranklab.estimators import average_rank, estimate_cov11, moving_rho, moving_theta
from ranklab.rank_model import DEFAULT_PARAMS, rho, theta
from ranklab.simulator import SimConfig, simulate_sequence

# Every curve's random draws are keyed by (seed, height, index), so the
# dataset is the same for any thread count.
data = simulate_sequence(SimConfig(max_height=10**7, seed=2024, params=DEFAULT_PARAMS))
print(len(data), "curves up to height 1e7", data.meta)

# Moving ratios over the last window against the model at its midpoint.
X, N = 8 * 10**6, 2 * 10**6
for n in (1, 2, 3):
    p = moving_theta(data, n, X, N)
    print(f"theta_{n}: observed {p.value:.4f} over {p.sample_count} curves, model {theta(n, X + N / 2):.4f}")
for n in (2, 3):
    p = moving_rho(data, n, X, N)
    print(f"rho_{n}:   observed {p.value:.4f} over {p.sample_count} curves, model {rho(n, X + N / 2):.4f}")

print("cov of two rank-4 symbols:", round(estimate_cov11(data, 4, 0, 10**7), 4), "(model -0.025)")
print("average rank up to 1e7:", average_rank(data, 10**7))
