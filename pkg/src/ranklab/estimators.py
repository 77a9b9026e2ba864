"""Statistics computed from a curve dataset, and fits of the model constants.

Moving ratios look at the curves with height in a window (X, X+N]:

    theta_n(X, N) = #{Selmer rank n} / #{all curves}
    rho_n(X, N)   = sum(rank - (n mod 2)) / ((n - (n mod 2)) * #{Selmer rank n})

rho_n(X, N) is the fraction of Selmer symbols that are Mordell-Weil.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, EmptyWindowError


class FitError(ValueError):
    """The points cannot determine the requested model."""


class InsufficientSampleError(ValueError):
    def __init__(self, count: int, needed: int):
        super().__init__(f"window has {count} usable records, need at least {needed}")
        self.count = count
        self.needed = needed


@dataclass(frozen=True)
class RatioPoint:
    X: int
    N: int
    value: float
    sample_count: int


def moving_theta(data: Dataset, n: int, X: int, N: int) -> RatioPoint:
    """Fraction of curves in (X, X+N] with Selmer rank n.

    Raises:
        EmptyWindowError: if no curve falls in the window.
    """
    w = data.window(X, N)
    total = w.stop - w.start
    if total == 0:
        raise EmptyWindowError(f"no curves with height in ({X}, {X + N}]")
    hits = int(np.count_nonzero(data.selmer_rank[w] == n))
    return RatioPoint(X, N, hits / total, total)


def moving_rho(data: Dataset, n: int, X: int, N: int) -> RatioPoint:
    """Fraction of Selmer symbols that are Mordell-Weil among rank-n curves in (X, X+N].

    Raises:
        EmptyWindowError: if the window has no curve of Selmer rank n.
    """
    if n < 2:
        raise ValueError("curves of Selmer rank below 2 carry no symbols")
    w = data.window(X, N)
    mask = data.selmer_rank[w] == n
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise EmptyWindowError(f"no curves of Selmer rank {n} in ({X}, {X + N}]")
    parity = n % 2
    mw_total = int((data.rank[w][mask] - parity).sum())
    return RatioPoint(X, N, mw_total / ((n - parity) * count), count)


def estimate_cov11(data: Dataset, n: int, X: int, N: int, min_count: int = 30) -> float:
    """Covariance of two symbols: P(rank = n | Selmer rank n) - rho_n(X, N)^2.

    Raises:
        InsufficientSampleError: if fewer than min_count rank-n curves are in the window.
    """
    if n // 2 < 2:
        raise ValueError("covariance needs two symbols, so Selmer rank 4 or 5")
    w = data.window(X, N)
    mask = data.selmer_rank[w] == n
    count = int(np.count_nonzero(mask))
    if count < min_count:
        raise InsufficientSampleError(count, min_count)
    full = int(np.count_nonzero(data.rank[w][mask] == n)) / count
    r = moving_rho(data, n, X, N).value
    return full - r * r


def _upto(data: Dataset, X: int) -> slice:
    w = data.upto(X)
    if w.stop == 0:
        raise EmptyWindowError(f"no curves with height <= {X}")
    return w


def average_rank(data: Dataset, X: int, restrict_n: int | None = None) -> float:
    """Mean rank of curves with height <= X.

    With restrict_n, only Selmer-rank-n curves contribute to the sum but the
    divisor is still the number of all curves up to X.
    """
    w = _upto(data, X)
    ranks = data.rank[w]
    if restrict_n is not None:
        ranks = ranks[data.selmer_rank[w] == restrict_n]
    return float(ranks.sum()) / w.stop


def average_selmer_rank(data: Dataset, X: int) -> float:
    """Mean Selmer rank of curves with height <= X."""
    w = _upto(data, X)
    return float(data.selmer_rank[w].sum()) / w.stop


def moving_series(data: Dataset, stat: str, n: int | None, N: int, start: int | None = None) -> list[RatioPoint]:
    """Consecutive windows (X, X+N] covering the dataset, one point per nonempty window.

    stat is "theta", "rho", "cov", "avgrank" or "avgselrank". For the two
    averages the value is the cumulative average up to X+N and sample_count
    is the number of curves up to X+N. Windows without usable records are
    skipped.
    """
    if len(data) == 0:
        raise EmptyWindowError("dataset is empty")
    if N < 1:
        raise ValueError("window width must be positive")
    X = (int(data.height[0]) - 1) // N * N if start is None else start
    last = int(data.height[-1])
    out = []
    while X < last:
        try:
            if stat == "theta":
                out.append(moving_theta(data, n, X, N))
            elif stat == "rho":
                out.append(moving_rho(data, n, X, N))
            elif stat == "cov":
                w = data.window(X, N)
                cnt = int(np.count_nonzero(data.selmer_rank[w] == n))
                out.append(RatioPoint(X, N, estimate_cov11(data, n, X, N), cnt))
            elif stat == "avgrank":
                out.append(RatioPoint(X, N, average_rank(data, X + N), data.upto(X + N).stop))
            elif stat == "avgselrank":
                out.append(RatioPoint(X, N, average_selmer_rank(data, X + N), data.upto(X + N).stop))
            else:
                raise ValueError(f"unknown statistic {stat!r}")
        except (EmptyWindowError, InsufficientSampleError):
            pass
        X += N
    return out


def _weighted_line(x: np.ndarray, y: np.ndarray, w: np.ndarray):
    """Weighted least squares y ~ a + b x; returns (a, b, rms residual)."""
    sw = np.sqrt(w)
    design = np.column_stack([np.ones_like(x), x]) * sw[:, None]
    (a, b), *_ = np.linalg.lstsq(design, y * sw, rcond=None)
    resid = y - (a + b * x)
    rms = math.sqrt(float(np.sum(w * resid**2) / np.sum(w)))
    return float(a), float(b), rms


def _prepare(points, need_unit_interval: bool = True):
    if len(points) < 3:
        raise FitError(f"need at least 3 points, got {len(points)}")
    X = np.array([p.X for p in points], dtype=float)
    y = np.array([p.value for p in points], dtype=float)
    w = np.array([p.sample_count for p in points], dtype=float)
    if np.any(X <= 0):
        raise FitError("window positions X must be positive")
    if len(np.unique(X)) < 2:
        raise FitError("all points share the same X; the slope is undetermined")
    if np.any(y <= 0) or (need_unit_interval and np.any(y >= 1)):
        raise FitError("ratio values must lie strictly between 0 and 1")
    if np.any(w <= 0):
        w = np.where(w > 0, w, 0.0)
        if not np.any(w > 0):
            raise FitError("all sample counts are zero")
    return X, y, w


def fit_rho(points: list[RatioPoint], n: int | None = None) -> tuple[float, float, float]:
    """Fit rho(X) = D X^-f by weighted least squares on log rho = log D - f log X.

    Weights are the sample counts.

    Returns:
        (D, f, rms residual in log space).
    """
    X, y, w = _prepare(points)
    a, b, rms = _weighted_line(np.log(X), np.log(y), w)
    return math.exp(a), -b, rms


def fit_theta(points: list[RatioPoint], n: int, s_n: float) -> tuple[float, float, float]:
    """Fit theta(X) = s_n / (1 + C X^-e) with s_n held fixed.

    Linearizes log|s_n/theta - 1| = log|C| - e log X (C negative when the
    points lie above s_n), then takes one weighted Gauss-Newton step on the
    original form.

    Returns:
        (C, e, rms residual of theta).

    Raises:
        FitError: if points lie on both sides of s_n, or on it.
    """
    X, y, w = _prepare(points)
    ratio = s_n / y - 1.0
    if np.any(ratio == 0) or (np.any(ratio > 0) and np.any(ratio < 0)):
        raise FitError(f"points straddle s_{n} = {s_n}; C cannot have a single sign")
    sign = 1.0 if ratio[0] > 0 else -1.0
    logX = np.log(X)
    a, b, _ = _weighted_line(logX, np.log(np.abs(ratio)), w)
    C, e = sign * math.exp(a), -b

    # one Gauss-Newton step on theta = s / (1 + C X^-e)
    Xe = X**-e
    model = s_n / (1.0 + C * Xe)
    dC = -s_n * Xe / (1.0 + C * Xe) ** 2
    de = s_n * C * Xe * logX / (1.0 + C * Xe) ** 2
    J = np.column_stack([dC, de])
    sw = np.sqrt(w)
    step, *_ = np.linalg.lstsq(J * sw[:, None], (y - model) * sw, rcond=None)
    C_new, e_new = C + step[0], e + step[1]
    if np.all(1.0 + C_new * X**-e_new > 0):
        C, e = C_new, e_new
    final = s_n / (1.0 + C * X**-e)
    rms = math.sqrt(float(np.sum(w * (y - final) ** 2) / np.sum(w)))
    return float(C), float(e), rms
