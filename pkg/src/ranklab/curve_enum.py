"""Counting and enumerating minimal short Weierstrass curves by naive height.

A pair (A, B) stands for y^2 = x^3 + A x + B. Its naive height is
max(4|A|^3, 27 B^2). The pair is admissible when the curve is nonsingular
(4A^3 + 27B^2 != 0) and minimal (no d > 1 with d^4 | A and d^6 | B).

Counting all nonsingular pairs below X is a product of two ranges minus
the singular locus A = -3t^2, B = +-2t^3. Minimal pairs then follow by
Moebius inversion over the scaling (A, B) -> (d^4 A, d^6 B), which
multiplies the height by d^12.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt
from typing import Iterator

import numpy as np

INT64_MAX = 2**63 - 1
MAX_ABS_A = 1_300_000
MAX_ABS_B = 580_000_000


class CapExceededError(RuntimeError):
    """Raised when an enumeration would produce more pairs than allowed."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"interval holds {count} curves, above the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True, order=True)
class WeierstrassPair:
    A: int
    B: int

    @property
    def height(self) -> int:
        return naive_height(self)


@dataclass(frozen=True)
class HeightInterval:
    """Half-open height range (lo, hi]."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo or self.hi > INT64_MAX:
            raise ValueError(f"invalid height interval ({self.lo}, {self.hi}]")


def integer_root(x: int, k: int) -> int:
    """Largest integer r >= 0 with r**k <= x."""
    if x < 0:
        raise ValueError("integer_root needs x >= 0")
    if x < 2:
        return x
    if k == 2:
        return isqrt(x)
    # float guess then exact correction; the guess is within one or two units
    r = int(round(x ** (1.0 / k)))
    while r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def naive_height(pair: WeierstrassPair) -> int:
    """Return max(4|A|^3, 27B^2) in exact integer arithmetic.

    Raises:
        OverflowError: if the height would not fit in a signed 64-bit integer.
    """
    a, b = abs(pair.A), abs(pair.B)
    if a > MAX_ABS_A or b > MAX_ABS_B:
        raise OverflowError(f"height of {pair} exceeds the 64-bit range")
    return max(4 * a**3, 27 * b * b)


def is_admissible(pair: WeierstrassPair) -> bool:
    """True iff the pair is nonsingular and minimal."""
    A, B = pair.A, pair.B
    if 4 * A**3 + 27 * B * B == 0:
        return False
    if A == 0:
        dmax = integer_root(abs(B), 6)
    else:
        dmax = integer_root(abs(A), 4)
    for d in range(2, dmax + 1):
        if A % d**4 == 0 and B % d**6 == 0:
            return False
    return True


def count_all_pairs(X: int) -> int:
    """Number of nonsingular pairs (minimal or not) with height <= X.

    The A-range |A| <= (X/4)^(1/3) and the B-range |B| <= (X/27)^(1/2) are
    independent, so every A in range sees the same 2b+1 values of B.
    """
    if X <= 0:
        return 0
    a = integer_root(X // 4, 3)
    b = isqrt(X // 27)
    # drop the origin and the pairs (-3t^2, +-2t^3), t >= 1, of height 108 t^6
    t = integer_root(X // 108, 6)
    return (2 * a + 1) * (2 * b + 1) - 1 - 2 * t


def mobius(n: int) -> int:
    result = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    if n > 1:
        result = -result
    return result


def count_minimal_upto(X: int) -> int:
    """Number of admissible pairs with height <= X."""
    total = 0
    d = 1
    while d**12 <= X:
        mu = mobius(d)
        if mu:
            total += mu * count_all_pairs(X // d**12)
        d += 1
    return total


def count_minimal(interval: HeightInterval) -> int:
    """Number of admissible pairs with height in (lo, hi]."""
    return count_minimal_upto(interval.hi) - count_minimal_upto(interval.lo)


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("RANKLAB_THREADS")
    if env:
        return max(1, int(env))
    return 1


def _pairs_for_a_range(a_values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Admissible pairs with A in a_values and height in (lo, hi], unsorted.

    Returns an (m, 3) int64 array of (height, A, B).
    """
    bmax = isqrt(hi // 27)
    B = np.arange(-bmax, bmax + 1, dtype=np.int64)
    b27 = 27 * B * B
    small_primes = [p for p in range(2, integer_root(MAX_ABS_A, 4) + 1) if mobius(p) == -1]
    chunks = []
    for A in a_values.tolist():
        hA = 4 * abs(A) ** 3
        if hA > hi:
            continue
        h = np.maximum(hA, b27)
        keep = (h > lo) & (4 * A**3 + b27 != 0)
        for p in small_primes:
            if p**4 > abs(A) and A != 0:
                break
            if A % p**4 == 0:
                keep &= B % p**6 != 0
        if keep.any():
            rows = np.empty((int(keep.sum()), 3), dtype=np.int64)
            rows[:, 0] = h[keep]
            rows[:, 1] = A
            rows[:, 2] = B[keep]
            chunks.append(rows)
    if not chunks:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(chunks)


def enumerate_minimal_array(
    interval: HeightInterval, cap: int = 10_000_000, workers: int | None = None
) -> np.ndarray:
    """All admissible pairs in the interval as an (m, 3) array of (height, A, B).

    Rows are sorted by (height, A, B). The A-range is split across worker
    threads; the final sort makes the result independent of the split.

    Raises:
        CapExceededError: if the interval holds more than cap pairs.
    """
    count = count_minimal(interval)
    if count > cap:
        raise CapExceededError(count, cap)
    if count == 0:
        return np.empty((0, 3), dtype=np.int64)
    lo, hi = interval.lo, interval.hi
    amax = integer_root(hi // 4, 3)
    a_all = np.arange(-amax, amax + 1, dtype=np.int64)
    nworkers = _worker_count(workers)
    parts = np.array_split(a_all, nworkers)
    if nworkers == 1:
        results = [_pairs_for_a_range(a_all, lo, hi)]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(lambda part: _pairs_for_a_range(part, lo, hi), parts))
    rows = np.concatenate(results)
    order = np.lexsort((rows[:, 2], rows[:, 1], rows[:, 0]))
    rows = rows[order]
    if len(rows) != count:
        raise AssertionError(f"enumerated {len(rows)} pairs but counted {count}")
    return rows


def enumerate_minimal(
    interval: HeightInterval, cap: int = 10_000_000, workers: int | None = None
) -> Iterator[WeierstrassPair]:
    """Yield admissible pairs in the interval in ascending (height, A, B) order."""
    rows = enumerate_minimal_array(interval, cap=cap, workers=workers)
    for _, A, B in rows.tolist():
        yield WeierstrassPair(A, B)
