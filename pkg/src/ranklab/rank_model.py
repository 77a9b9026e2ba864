"""Parametric model for Selmer ranks and Mordell-Weil ranks by height.

A curve of height X has Selmer rank n with probability

    theta_n(X) = s_n / (1 + C_n X^-e_n),        n = 1..5,

and theta_0 takes the leftover mass. Each of the floor(n/2) Selmer symbols
of a rank-n curve is Mordell-Weil with probability rho_n(X) = D_n X^-f_n.
For n = 4, 5 the two symbols are equicorrelated with covariance cov11_n.
"""

import hashlib
import json
from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple

import numpy as np

from .constants import NMAX_MODELED, poonen_rains_s

DEFAULT_THETA = {
    1: (-0.40116957, 0.08540201),
    2: (1.41108621, 0.12348659),
    3: (11.18222736, 0.14061542),
    4: (179.71749981, 0.20339670),
    5: (95474.85098037, 0.39937065),
}
DEFAULT_RHO = {
    2: (1.12465347, 0.02344245),
    3: (1.30937016, 0.04412662),
    4: (1.07928016, 0.02158211),
    5: (1.79161787, 0.04383626),
}
DEFAULT_COV11 = {2: 0.0, 3: 0.0, 4: -0.025, 5: 0.0}


class ModelDomainError(ValueError):
    """Raised when the model is evaluated where it is undefined."""


class MissingCovarianceError(KeyError):
    def __init__(self, key: tuple[int, int, int]):
        super().__init__(f"covariance C^{key[0]}_{{{key[1]},{key[2]}}} is not in the table")
        self.key = key


@dataclass(frozen=True)
class ModelParams:
    """Constants of the Selmer and Hasse ratio models.

    Attributes:
        s: Limit densities s_0..s_5.
        theta: n -> (C_n, e_n) for n = 1..5.
        rho: n -> (D_n, f_n) for n = 2..5.
        cov11: n -> C^n_{1,1} for n = 2..5 (only n = 4, 5 enter the model).
    """

    s: tuple = field(default_factory=lambda: tuple(poonen_rains_s(n) for n in range(NMAX_MODELED + 1)))
    theta: dict = field(default_factory=lambda: dict(DEFAULT_THETA))
    rho: dict = field(default_factory=lambda: dict(DEFAULT_RHO))
    cov11: dict = field(default_factory=lambda: dict(DEFAULT_COV11))
    nmax: int = NMAX_MODELED

    def __hash__(self):
        return hash(self.to_json())

    def to_dict(self) -> dict:
        return {
            "nmax": self.nmax,
            "s": [float(v) for v in self.s],
            "theta": {str(n): {"C": float(c), "e": float(e)} for n, (c, e) in sorted(self.theta.items())},
            "rho": {str(n): {"D": float(d), "f": float(f)} for n, (d, f) in sorted(self.rho.items())},
            "cov11": {str(n): float(c) for n, c in sorted(self.cov11.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        nmax = int(data.get("nmax", NMAX_MODELED))
        if nmax != NMAX_MODELED:
            raise ValueError(f"only nmax = {NMAX_MODELED} is modeled, got {nmax}")
        s = tuple(float(v) for v in data["s"])
        if len(s) != nmax + 1:
            raise ValueError(f"expected {nmax + 1} densities, got {len(s)}")
        theta = {int(k): (float(v["C"]), float(v["e"])) for k, v in data["theta"].items()}
        rho = {int(k): (float(v["D"]), float(v["f"])) for k, v in data["rho"].items()}
        cov11 = {int(k): float(v) for k, v in data.get("cov11", {}).items()}
        if sorted(theta) != list(range(1, nmax + 1)):
            raise ValueError("theta constants must cover n = 1..5")
        if sorted(rho) != list(range(2, nmax + 1)):
            raise ValueError("rho constants must cover n = 2..5")
        for n in range(2, nmax + 1):
            cov11.setdefault(n, 0.0)
        return cls(s=s, theta=theta, rho=rho, cov11=cov11, nmax=nmax)

    def params_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def replace(self, **changes) -> "ModelParams":
        data = {"s": self.s, "theta": dict(self.theta), "rho": dict(self.rho), "cov11": dict(self.cov11)}
        for key, value in changes.items():
            if key in ("theta", "rho", "cov11"):
                data[key].update(value)
            else:
                data[key] = value
        return ModelParams(s=tuple(data["s"]), theta=data["theta"], rho=data["rho"], cov11=data["cov11"])

    def violations(self) -> list[str]:
        """List the sign conventions this parameter set breaks, if any."""
        out = []
        for n, (c, e) in self.theta.items():
            if e <= 0:
                out.append(f"e_{n} must be positive")
            if n == 1 and c >= 0:
                out.append("C_1 must be negative")
            if n >= 2 and c <= 0:
                out.append(f"C_{n} must be positive")
        for n, (d, f) in self.rho.items():
            if d <= 0:
                out.append(f"D_{n} must be positive")
            if f <= 0:
                out.append(f"f_{n} must be positive")
        return out

    def covariance_table(self) -> "CovarianceTable":
        entries = {(n, 1, 1): c for n, c in self.cov11.items() if n // 2 >= 2}
        return CovarianceTable(entries)


DEFAULT_PARAMS = ModelParams()


@dataclass(frozen=True)
class CovarianceTable:
    """Covariances C^n_{s,t} keyed by (n, s, t), s, t >= 1, s + t <= floor(n/2)."""

    entries: dict

    def get(self, n: int, s: int, t: int) -> float:
        try:
            return self.entries[(n, s, t)]
        except KeyError:
            raise MissingCovarianceError((n, s, t)) from None


def _is_scalar(X) -> bool:
    return isinstance(X, (int, float)) and not isinstance(X, bool)


def theta_clamped(n: int, X, params: ModelParams = DEFAULT_PARAMS):
    """theta_n(X) together with a flag telling whether it was clipped to [0, 1].

    X may be a scalar or a numpy array.
    """
    if n not in params.theta:
        raise ValueError(f"Selmer rank {n} is not modeled")
    C, e = params.theta[n]
    s = params.s[n]
    if _is_scalar(X):
        denom = 1.0 + C * X**-e
        if denom <= 0:
            raise ModelDomainError(f"1 + C_{n} X^-e_{n} <= 0 at X = {X}")
        val = s / denom
        if val > 1.0:
            return 1.0, True
        return val, False
    X = np.asarray(X, dtype=float)
    denom = 1.0 + C * X**-e
    if np.any(denom <= 0):
        raise ModelDomainError(f"1 + C_{n} X^-e_{n} <= 0 for some heights")
    val = s / denom
    clamped = bool(np.any(val > 1.0))
    return np.minimum(val, 1.0), clamped


def theta(n: int, X, params: ModelParams = DEFAULT_PARAMS):
    """Probability theta_n(X) that a height-X curve has Selmer rank n (n = 1..5)."""
    return theta_clamped(n, X, params)[0]


def theta_zero(X, params: ModelParams = DEFAULT_PARAMS):
    """Residual mass 1 - sum_{n=1}^5 theta_n(X); ranks above 5 are folded in here.

    Raises:
        ModelDomainError: if the modeled ranks already exceed total mass 1.
    """
    total = sum(theta(n, X, params) for n in range(1, params.nmax + 1))
    resid = 1.0 - total
    if np.any(np.asarray(resid) < -1e-15):
        raise ModelDomainError(f"theta_1..theta_5 sum above 1 at X = {X}")
    if _is_scalar(X):
        return max(resid, 0.0)
    return np.maximum(resid, 0.0)


def rho_clamped(n: int, X, params: ModelParams = DEFAULT_PARAMS):
    """rho_n(X) and whether the power law was cut off at 1."""
    if n not in params.rho:
        raise ValueError(f"Hasse ratio for Selmer rank {n} is not modeled")
    D, f = params.rho[n]
    if _is_scalar(X):
        val = D * X**-f
        if val > 1.0:
            return 1.0, True
        return val, False
    val = D * np.asarray(X, dtype=float) ** -f
    return np.minimum(val, 1.0), bool(np.any(val > 1.0))


def rho(n: int, X, params: ModelParams = DEFAULT_PARAMS):
    """Probability rho_n(X) that a Selmer symbol of a rank-n curve is Mordell-Weil."""
    return rho_clamped(n, X, params)[0]


def rho_clamp_height(n: int, params: ModelParams = DEFAULT_PARAMS) -> float:
    """Height below which D_n X^-f_n exceeds 1 and rho_n is held at 1."""
    D, f = params.rho[n]
    if D <= 1.0:
        return 1.0
    return D ** (1.0 / f)


def expected_product(n: int, s: int, t: int, rho_value: float, cov: CovarianceTable) -> float:
    """E^n_{s,t}: expected value of a product of s indicators Y_i and t factors (1 - Y_j).

    The symbols are equicorrelated, so the answer depends only on (s, t).
    It is built up from E_{1,0} = rho and E_{0,1} = 1 - rho by

        E_{s,0} = E_{s-1,0} E_{1,0} + C_{s-1,1}
        E_{0,t} = E_{0,t-1} E_{0,1} - sum_{i=1}^{t-1} (-1)^i binom(t-1, i) C_{1,i}
        E_{s,t} = E_{s,0} E_{0,t} + sum_{i=1}^{t} (-1)^i binom(t, i) C_{s,i}

    Raises:
        MissingCovarianceError: naming the first covariance the recursion needs
            but the table lacks.
    """
    if s < 0 or t < 0:
        raise ValueError("s and t must be nonnegative")
    if s + t > max(n // 2, 0) and not (s == 0 and t == 0):
        raise ValueError(f"s + t = {s + t} exceeds floor({n}/2)")

    def e_s0(k: int) -> float:
        if k == 0:
            return 1.0
        val = rho_value
        for j in range(2, k + 1):
            val = val * rho_value + cov.get(n, j - 1, 1)
        return val

    def e_0t(k: int) -> float:
        if k == 0:
            return 1.0
        val = 1.0 - rho_value
        for j in range(2, k + 1):
            corr = sum((-1) ** i * comb(j - 1, i) * cov.get(n, 1, i) for i in range(1, j))
            val = val * (1.0 - rho_value) - corr
        return val

    if t == 0:
        return e_s0(s)
    if s == 0:
        return e_0t(t)
    corr = sum((-1) ** i * comb(t, i) * cov.get(n, s, i) for i in range(1, t + 1))
    return e_s0(s) * e_0t(t) + corr


def rank_distribution(n: int, X, params: ModelParams = DEFAULT_PARAMS) -> tuple[list[float], bool]:
    """Vector [p_n(0), ..., p_n(n)] of rank probabilities for Selmer rank n.

    For n = 4, 5 the covariance is first moved into the window where the
    joint law of the two symbols exists (see joint_bernoulli_pair); the flag
    reports whether that happened.
    """
    if not 1 <= n <= params.nmax:
        raise ValueError(f"Selmer rank {n} is not modeled")
    p = [0.0] * (n + 1)
    if n == 1:
        p[1] = 1.0
        return p, False
    r = rho(n, X, params)
    if n in (2, 3):
        p[n] = r
        p[n - 2] = 1.0 - r
        return p, False
    pair = joint_bernoulli_pair(r, params.cov11.get(n, 0.0))
    p[n] = pair.p11
    p[n - 2] = pair.p10 + pair.p01
    p[n - 4] = pair.p00
    return p, pair.clamped


def rank_probability(n: int, r: int, X, params: ModelParams = DEFAULT_PARAMS) -> float:
    """p_n(r): probability that a height-X curve of Selmer rank n has rank r.

    Ranks of the wrong parity, or above n, have probability 0.
    """
    if r < 0 or r > n or (n - r) % 2:
        if not 1 <= n <= params.nmax:
            raise ValueError(f"Selmer rank {n} is not modeled")
        return 0.0
    return rank_distribution(n, X, params)[0][r]


class JointPair(NamedTuple):
    p11: float
    p10: float
    p01: float
    p00: float
    clamped: bool


def covariance_window(rho_value: float) -> tuple[float, float]:
    """Range of covariances two Bernoulli(rho) variables can have."""
    lo = -np.minimum(rho_value**2, (1.0 - rho_value) ** 2)
    hi = rho_value * (1.0 - rho_value)
    if _is_scalar(rho_value):
        return float(lo), float(hi)
    return lo, hi


def joint_bernoulli_pair(rho_value: float, c: float) -> JointPair:
    """Joint law of two Bernoulli(rho) variables with covariance c.

    A covariance outside the feasible window is moved to the nearest edge
    and the result is flagged.
    """
    lo, hi = covariance_window(rho_value)
    clamped = False
    if c < lo or c > hi:
        c = min(max(c, lo), hi)
        clamped = True
    p11 = rho_value * rho_value + c
    p10 = rho_value * (1.0 - rho_value) - c
    p00 = (1.0 - rho_value) ** 2 + c
    # rounding can leave -1e-17 at the window edges
    p11, p10, p00 = max(p11, 0.0), max(p10, 0.0), max(p00, 0.0)
    return JointPair(p11, p10, p10, p00, clamped)


def closed_form_rank_probability(n: int, r: int, rho_value: float, c: float = 0.0) -> float:
    """Closed-form p_n(r) from rho and the covariance, without any clipping."""
    if r < 0 or r > n or (n - r) % 2:
        return 0.0
    if n == 1:
        return 1.0
    if n in (2, 3):
        return rho_value if r == n else 1.0 - rho_value
    if r == n:
        return rho_value**2 + c
    if r == n - 2:
        return 2.0 * rho_value * (1.0 - rho_value) - 2.0 * c
    return (1.0 - rho_value) ** 2 + c


def binomial_rank_probability(n: int, r: int, rho_value: float, cov: CovarianceTable) -> float:
    """p_n(r) = binom(floor(n/2), j) E^n_{floor(r/2), j} with n = r + 2j, via the recursion."""
    if r < 0 or r > n or (n - r) % 2:
        return 0.0
    j = (n - r) // 2
    if n == 1:
        return expected_product(1, 0, 0, rho_value, cov)
    return comb(r // 2 + j, j) * expected_product(n, r // 2, j, rho_value, cov)

