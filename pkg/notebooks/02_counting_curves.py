"""Counting and listing minimal Weierstrass curves by naive height.

Run: python3 notebooks/02_counting_curves.py
"""

import time

from ranklab.constants import KAPPA
from ranklab.curve_enum import HeightInterval, count_minimal, enumerate_minimal

# Small heights: list every pair, ordered by (height, A, B).
for pair in enumerate_minimal(HeightInterval(0, 100)):
    print(pair.height, pair.A, pair.B)

# Exact counts come from a closed form for all pairs plus Moebius inversion
# over the twists (A, B) -> (d^4 A, d^6 B), so huge heights are instant.
t0 = time.perf_counter()
total = count_minimal(HeightInterval(0, 26998673868))
print(f"curves up to 26998673868: {total} ({time.perf_counter() - t0:.4f} s)")

# Compare with the asymptotic count.
for X in (10**6, 10**9, 10**12, 10**15):
    exact = count_minimal(HeightInterval(0, X))
    print(f"X = {X:.0e}: exact {exact}, kappa X^(5/6) = {KAPPA * X ** (5 / 6):.1f}, diff / sqrt(X) = {(exact - KAPPA * X ** (5 / 6)) / X**0.5:+.3f}")

# Counts over a window (lo, hi].
print("(2e10, 2.025e10]:", count_minimal(HeightInterval(20_000_000_000, 20_250_000_000)))
