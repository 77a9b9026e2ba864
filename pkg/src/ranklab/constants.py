"""Universal constants: Selmer rank densities s_n and Brumer's kappa.

The densities are

    s_n = prod_{j>=0} (1 + 2^-j)^-1 * prod_{k=1}^{n} 2 / (2^k - 1)

and kappa = 2^(4/3) / (zeta(10) * 3^(3/2)) with zeta(10) = pi^10 / 93555.
"""

import math
from functools import lru_cache

# Factors 1/(1+2^-j) differ from 1 by less than 2^-j, so truncating the
# infinite product after J terms changes its log by at most 2^-(J-1).
PRODUCT_TERMS = 60

# Selmer ranks covered by the fitted model.
NMAX_MODELED = 5

KAPPA = 2.0 ** (4.0 / 3.0) / ((math.pi**10 / 93555.0) * 3.0**1.5)


@lru_cache(maxsize=None)
def _base_product() -> float:
    prod = 1.0
    for j in range(PRODUCT_TERMS):
        prod /= 1.0 + 2.0**-j
    return prod


@lru_cache(maxsize=None)
def poonen_rains_s(n: int) -> float:
    """Limiting density of curves with 2-Selmer rank n.

    Args:
        n: Selmer rank, n >= 0.

    Returns:
        s_n with absolute error below 1e-12.
    """
    if n < 0:
        raise ValueError(f"Selmer rank must be nonnegative, got {n}")
    val = _base_product()
    for k in range(1, n + 1):
        val *= 2.0 / (2.0**k - 1.0)
    return val


def selmer_density_table(nmax: int = 30) -> list[float]:
    """Return [s_0, ..., s_nmax]."""
    return [poonen_rains_s(n) for n in range(nmax + 1)]


def brumer_kappa() -> float:
    """Leading constant of the count of curves with naive height <= X.

    The number of minimal curves of height at most X is kappa * X^(5/6)
    plus an O(X^(1/2)) error.
    """
    return KAPPA


def tail_bound(nmax: int) -> float:
    """Majorant for sum_{n > nmax} n * s_n.

    Each s_n is at most t_n = s_1 / 2^(n(n-1)/2 - 1), so the tail of any of
    the weighted sums is below sum_{n > nmax} n * t_n. The majorant decays
    superexponentially, so a few dozen terms give the sum exactly in floats.
    """
    s1 = poonen_rains_s(1)
    return sum(math.ldexp(n * s1, 1 - n * (n - 1) // 2) for n in range(nmax + 1, nmax + 40))


def s_weighted_sum(kind: str, nmax: int = 30) -> float:
    """Weighted sums of the Selmer densities truncated at nmax.

    Args:
        kind: One of "total" (sum s_n), "alternating" (sum (-1)^n s_n),
            "odd" (sum of s_n over odd n) or "first_moment" (sum n s_n).
        nmax: Last index included. The omitted tail is below tail_bound(nmax).

    Returns:
        The truncated sum.
    """
    if kind not in ("total", "alternating", "odd", "first_moment"):
        raise ValueError(f"unknown sum kind {kind!r}")
    total = 0.0
    for n in range(nmax + 1):
        s = poonen_rains_s(n)
        if kind == "total":
            total += s
        elif kind == "alternating":
            total += -s if n % 2 else s
        elif kind == "odd":
            total += s if n % 2 else 0.0
        else:
            total += n * s
    return total
