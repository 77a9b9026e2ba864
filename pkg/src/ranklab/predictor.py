"""Predicted curve counts and average ranks from the rank model.

The expected number of curves of height <= X with Selmer rank n is

    pi_Sn(X) = (5 kappa / 6) * integral_0^X theta_n(H) H^(-1/6) dH,

and splitting by rank multiplies the integrand by p_n(r) in its binomial
form binom(floor(r/2) + j, j) * E^n_{floor(r/2), j}(H), n = r + 2j.

The model functions are only defined for H >= 1 (theta_1 has a pole just
below H = 1e-4), so integrands are evaluated at max(H, 1); the stretch
[0, 1] holds under one expected curve.

For very large X the integrals are replaced by series. Expanding
1 / (1 + C_n H^-e_n) as a geometric series in -C_n H^-e_n and integrating
term by term gives a convergent expansion once |C_n X^-e_n| < 1. The part
of the integral below a split point a_n is absorbed into a constant
(tau_n for the average rank, lambda_r for rank counts).
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .constants import KAPPA
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_density
from .rank_model import (
    DEFAULT_PARAMS,
    ModelParams,
    expected_product,
    rho,
    rho_clamp_height,
    theta,
)

QUADRATURE_LIMIT = 1e15
DEFAULT_SERIES_TERMS = 200
# ratio |C_n a^-e_n| at the split point used to compute the series constants
SPLIT_RATIO = 0.5


class SeriesDomainError(ValueError):
    """The series expansion does not converge (or is not valid) at this X."""


def _floor1(H: float) -> float:
    return H if H > 1.0 else 1.0


def _kinks(params: ModelParams, ns) -> list[float]:
    pts = [1.0]
    for n in ns:
        if n in params.rho:
            pts.append(rho_clamp_height(n, params))
    return pts


def predict_pi_Sn(n: int, X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Expected number of curves of height <= X with Selmer rank n."""
    if X < 1:
        raise ValueError("X must be at least 1")
    val = integrate_density(lambda H: theta(n, _floor1(H), params), 0.0, X, spec, _kinks(params, ()))
    return 5.0 * KAPPA / 6.0 * val


def _rank_weight(r: int, n: int, params: ModelParams):
    """H -> binom(floor(r/2)+j, j) E^n_{floor(r/2), j}(H) as a function of H."""
    if r < 0 or r > n or (n - r) % 2:
        raise ValueError(f"rank {r} is impossible for Selmer rank {n}")
    j = (n - r) // 2
    s = r // 2
    cov = params.covariance_table()
    weight = comb(s + j, j)
    if n == 1:
        return lambda H: 1.0
    return lambda H: weight * expected_product(n, s, j, rho(n, H, params), cov)


def predict_pi_Rr_Sn(
    r: int, n: int, X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC
) -> float:
    """Expected number of curves of height <= X with rank r and Selmer rank n."""
    if X < 1:
        raise ValueError("X must be at least 1")
    if not 1 <= n <= params.nmax:
        raise ValueError(f"Selmer rank {n} is not modeled")
    w = _rank_weight(r, n, params)

    def g(H: float) -> float:
        H = _floor1(H)
        return theta(n, H, params) * w(H)

    return 5.0 * KAPPA / 6.0 * integrate_density(g, 0.0, X, spec, _kinks(params, (n,)))


def predict_pi_Rr(r: int, X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Expected number of curves of height <= X with rank r, summed over Selmer ranks n <= 5."""
    if not 1 <= r <= params.nmax:
        raise ValueError("rank must be between 1 and 5")
    return math.fsum(predict_pi_Rr_Sn(r, n, X, params, spec) for n in range(r, params.nmax + 1, 2))


def error_band(n: int, X: float, params: ModelParams = DEFAULT_PARAMS) -> float:
    """Size s_n X^(1/2) of the error term attached to count predictions."""
    return params.s[n] * math.sqrt(X)


def predict_avg_selmer_rank(X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Expected average Selmer rank over curves of height <= X (ranks 1..5 only)."""
    if X < 1:
        raise ValueError("X must be at least 1")

    def g(H: float) -> float:
        H = _floor1(H)
        return sum(n * theta(n, H, params) for n in range(1, params.nmax + 1))

    return 5.0 / 6.0 * integrate_density(g, 0.0, X, spec, _kinks(params, ())) / X ** (5.0 / 6.0)


def _avg_rank_weight(n: int, H: float, params: ModelParams) -> float:
    k = n // 2
    return n % 2 + (2 * k * rho(n, H, params) if k else 0.0)


def avg_rank_integral(n: int, X_lo: float, X_hi: float, params: ModelParams, spec: QuadratureSpec) -> float:
    """(5/6) * integral over [X_lo, X_hi] of theta_n(H) (n mod 2 + 2 floor(n/2) rho_n(H)) H^(-1/6) dH."""
    if X_hi <= X_lo:
        return 0.0

    def g(H: float) -> float:
        H = _floor1(H)
        return theta(n, H, params) * _avg_rank_weight(n, H, params)

    return 5.0 / 6.0 * integrate_density(g, X_lo, X_hi, spec, _kinks(params, (n,)))


@dataclass(frozen=True)
class SeriesParams:
    """Constants of the large-X expansion for one Selmer rank n.

    Attributes:
        n: Selmer rank.
        h: Smallest integer with |C_n h^-e_n| < 1.
        split: Height a_n >= h where the integral is matched to the series.
        mu: (5/6) * integral over [1, h] of the average-rank integrand.
        tau: Constant with contribution_n(X) = s_n (tau / X^(5/6) + series).
        lower: Smallest X where the expansion is valid.
        series_terms: Maximum number of geometric terms.
    """

    n: int
    h: int
    split: float
    mu: float
    tau: float
    lower: float
    series_terms: int = DEFAULT_SERIES_TERMS


def convergence_height(n: int, params: ModelParams = DEFAULT_PARAMS) -> int:
    """Smallest integer h >= 1 with |C_n h^-e_n| < 1."""
    C, e = params.theta[n]
    if abs(C) < 1.0:
        return 1
    h = max(1, int(math.floor(abs(C) ** (1.0 / e))))
    while abs(C) * h**-e >= 1.0:
        h += 1
    while h > 1 and abs(C) * (h - 1) ** -e < 1.0:
        h -= 1
    return h


def _split_height(n: int, params: ModelParams, extra_floor: float = 1.0) -> float:
    C, e = params.theta[n]
    a = max(float(convergence_height(n, params)), extra_floor, 10.0)
    if abs(C) > 0:
        a = max(a, (abs(C) / SPLIT_RATIO) ** (1.0 / e))
    return a


def _geometric_sum(q: float, coeff, terms: int) -> float:
    """sum_{m < terms} q^m coeff(m), stopping once terms fall below double precision."""
    total = 0.0
    qm = 1.0
    for m in range(terms):
        term = qm * coeff(m)
        total += term
        if abs(qm) < 1e-18:
            return total
        qm *= q
    if abs(qm) > 1e-12:
        warnings.warn(f"series truncated with tail ratio {abs(qm):.2e} above 1e-12", RuntimeWarning, stacklevel=3)
    return total


def _avg_rank_series_part(n: int, X: float, params: ModelParams, terms: int) -> float:
    """sum over m of (-C_n X^-e_n)^m [ (n mod 2)/(1 - 6me/5) + 2k D X^-f / (1 - 6(f+me)/5) ]."""
    C, e = params.theta[n]
    k = n // 2
    q = -C * X**-e
    if k:
        D, f = params.rho[n]
        Xf = D * X**-f
        return _geometric_sum(
            q, lambda m: (n % 2) / (1.0 - 1.2 * m * e) + 2 * k * Xf / (1.0 - 1.2 * (f + m * e)), terms
        )
    return _geometric_sum(q, lambda m: 1.0 / (1.0 - 1.2 * m * e), terms)


@lru_cache(maxsize=32)
def series_params(n: int, params: ModelParams = DEFAULT_PARAMS, series_terms: int = DEFAULT_SERIES_TERMS) -> SeriesParams:
    """Compute (and cache) the expansion constants for Selmer rank n."""
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-12)
    h = convergence_height(n, params)
    clamp = rho_clamp_height(n, params) if n in params.rho else 1.0
    a = _split_height(n, params, clamp)
    s = params.s[n]
    mu = avg_rank_integral(n, 1.0, float(h), params, spec)
    integral_a = mu + avg_rank_integral(n, float(h), a, params, spec)
    tau = (integral_a - s * a ** (5.0 / 6.0) * _avg_rank_series_part(n, a, params, series_terms)) / s
    return SeriesParams(n=n, h=h, split=a, mu=mu, tau=tau, lower=max(float(h), clamp), series_terms=series_terms)


def avg_rank_series_term(n: int, X: float, params: ModelParams = DEFAULT_PARAMS) -> float:
    """Contribution of Selmer rank n to the average rank at X, from the expansion."""
    sp = series_params(n, params)
    if X <= sp.lower:
        raise SeriesDomainError(f"expansion for n = {n} needs X > {sp.lower:.6g}")
    return params.s[n] * (sp.tau / X ** (5.0 / 6.0) + _avg_rank_series_part(n, X, params, sp.series_terms))


def avg_rank_quadrature_term(n: int, X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Contribution of Selmer rank n to the average rank at X, by quadrature."""
    return avg_rank_integral(n, 1.0, X, params, spec) / X ** (5.0 / 6.0)


def series_lower_limit(params: ModelParams = DEFAULT_PARAMS) -> float:
    """X above which the average-rank expansion is valid for every n."""
    return max(series_params(n, params).lower for n in range(1, params.nmax + 1))


def predict_avg_rank(
    X: float, params: ModelParams = DEFAULT_PARAMS, spec: QuadratureSpec = DEFAULT_SPEC, method: str | None = None
) -> float:
    """Expected average rank of curves of height <= X.

    Args:
        X: Height bound, >= 1.
        method: "quadrature", "series", or None to pick quadrature below 1e15
            and the series above.

    Raises:
        SeriesDomainError: series requested at or below some h_n.
        ValueError: quadrature requested at X >= 1e15.
    """
    if X < 1:
        raise ValueError("X must be at least 1")
    if method is None:
        method = "quadrature" if X < QUADRATURE_LIMIT else "series"
    if method == "quadrature":
        if X >= QUADRATURE_LIMIT:
            raise ValueError("quadrature is limited to X < 1e15; use the series")
        return math.fsum(avg_rank_quadrature_term(n, X, params, spec) for n in range(1, params.nmax + 1))
    if method == "series":
        return math.fsum(avg_rank_series_term(n, X, params) for n in range(1, params.nmax + 1))
    raise ValueError(f"unknown method {method!r}")


def _rank_count_series_part(r: int, X: float, params: ModelParams, terms: int) -> float:
    C, e = params.theta[r]
    q = -C * X**-e
    base = KAPPA * params.s[r] * X ** (5.0 / 6.0)
    if r == 1:
        return base * _geometric_sum(q, lambda m: 1.0 / (1.0 - 1.2 * m * e), terms)
    D, f = params.rho[r]
    return base * D * X**-f * _geometric_sum(q, lambda m: 1.0 / (1.0 - 1.2 * (f + m * e)), terms)


@lru_cache(maxsize=32)
def rank_count_series_constants(r: int, params: ModelParams = DEFAULT_PARAMS, series_terms: int = DEFAULT_SERIES_TERMS):
    """(lambda_r, lower limit, split point) for the expansion of pi_{R_r and S_r}."""
    if r not in (1, 2, 3):
        raise ValueError("the rank-count expansion covers r = 1, 2, 3")
    spec = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-12)
    h = convergence_height(r, params)
    clamp = rho_clamp_height(r, params) if r in params.rho else 1.0
    a = _split_height(r, params, clamp)
    lam = predict_pi_Rr_Sn(r, r, a, params, spec) - _rank_count_series_part(r, a, params, series_terms)
    return lam, max(float(h), clamp), a


def series_pi_rank(r: int, X: float, params: ModelParams = DEFAULT_PARAMS, series_terms: int = DEFAULT_SERIES_TERMS) -> float:
    """Expected count of curves with rank r and Selmer rank r (r = 1, 2, 3) from the expansion.

    Raises:
        SeriesDomainError: if X is at or below the convergence height h_r (or
            below the height where rho_r stops being clipped at 1).
    """
    lam, lower, _ = rank_count_series_constants(r, params, series_terms)
    if X <= lower:
        raise SeriesDomainError(f"expansion for r = {r} needs X > {lower:.6g}")
    return lam + _rank_count_series_part(r, X, params, series_terms)


def predicted_std_errors(
    kind: str,
    n: int,
    X: float,
    N: float,
    params: ModelParams = DEFAULT_PARAMS,
    window_count: float | None = None,
    rho_value: float | None = None,
) -> float:
    """Predicted standard error of a moving ratio over the window (X, X+N].

    Args:
        kind: "theta" for theta_n(X, N); "rho1" for rho_n(X, N) using the
            observed number of Selmer-rank-n curves in the window
            (window_count); "rho2" for rho_n(X, N) using the model throughout.
        n: Selmer rank.
        X: Window start.
        N: Window width.
        window_count: Observed count, required for "rho1".
        rho_value: Use this value of rho_n(X) instead of the model's.
    """
    if X < 1 or N < 1:
        raise ValueError("X and N must be at least 1")
    if kind == "theta":
        t = theta(n, X, params)
        return math.sqrt(6.0 * X ** (1.0 / 6.0) * t * (1.0 - t) / (5.0 * N * KAPPA))
    k = n // 2
    if k < 1:
        raise ValueError("Hasse ratios need Selmer rank >= 2")
    r = rho(n, X, params) if rho_value is None else rho_value
    c = params.cov11.get(n, 0.0)
    var = k * (r * (1.0 - r) + (k - 1) * c)
    if kind == "rho1":
        if not window_count:
            raise ValueError("rho1 needs the observed window count")
        return math.sqrt(var / window_count)
    if kind == "rho2":
        C, e = params.theta[n]
        return math.sqrt(6.0 * X ** (1.0 / 6.0) * (1.0 + C * X**-e) * var / (5.0 * KAPPA * params.s[n] * N))
    raise ValueError(f"unknown error kind {kind!r}")
