"""Selmer rank densities and the curve-count constant.

Run: python3 notebooks/01_selmer_densities.py
"""

from ranklab.constants import KAPPA, s_weighted_sum, selmer_density_table, tail_bound

# The limiting share of curves with 2-Selmer rank n falls off fast: each
# step multiplies by 2 / (2^(n+1) - 1).
for n, s in enumerate(selmer_density_table(8)):
    print(f"s_{n} = {s:.8f}")

# The densities form a probability distribution, half of it on odd ranks.
print("total       ", s_weighted_sum("total"))
print("odd ranks   ", s_weighted_sum("odd"))
print("mean        ", s_weighted_sum("first_moment"))
print("odd, n <= 5 ", s_weighted_sum("odd", 5), "(the long-run average rank under the model)")

# Truncating at n = 5 loses very little.
print("tail past 5 is below", tail_bound(5))

# Roughly kappa * X^(5/6) curves have height at most X.
print("kappa =", KAPPA)
