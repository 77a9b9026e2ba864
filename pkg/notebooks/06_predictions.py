"""Predicted curve counts by rank and the average rank.

Run: python3 notebooks/06_predictions.py
"""

from ranklab.predictor import (
    error_band,
    predict_avg_rank,
    predict_avg_selmer_rank,
    predict_pi_Rr,
    predict_pi_Rr_Sn,
    series_pi_rank,
)

X = 2.7e10
for r in range(1, 6):
    print(f"rank {r} curves up to {X:.2g}: {predict_pi_Rr(r, X):14.1f} +- {error_band(r, X):.0f}")

# Split by Selmer rank: rank-2 curves come from Selmer ranks 2 and 4.
print("rank 2 from Selmer 2:", predict_pi_Rr_Sn(2, 2, X), "from Selmer 4:", predict_pi_Rr_Sn(2, 4, X))

# The same counts from the series expansion in powers of X^-e.
print("rank 1 by series:", series_pi_rank(1, X))

# Average rank: quadrature below 1e15, series above. It falls toward
# s_1 + s_3 + s_5 = 0.49999965 very slowly.
for k in (10, 15, 20, 50, 100, 200, 300):
    print(f"average rank at 1e{k}: {predict_avg_rank(10.0**k):.6f}")
print("average Selmer rank at 1e10:", predict_avg_selmer_rank(1e10))

# Both routes agree where both apply.
print(predict_avg_rank(1e13, method="quadrature"), predict_avg_rank(1e13, method="series"))
