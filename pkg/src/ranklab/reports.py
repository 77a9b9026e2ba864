"""Plot-ready tables comparing a dataset with the model.

Each figure id produces one CSV; plotting is left to any external tool.
"""

import csv
import io

from .constants import KAPPA
from .dataset import Dataset, EmptyWindowError
from .estimators import InsufficientSampleError, estimate_cov11, moving_rho, moving_theta, moving_series
from .predictor import predict_avg_rank
from .rank_model import DEFAULT_PARAMS, ModelParams, rank_distribution, rho, theta

FIGURES = ("selmer-ratios", "hasse-ratios", "covariance", "average-rank", "rank-histogram", "curve-count")


def default_window(data: Dataset, windows: int = 50) -> int:
    if len(data) == 0:
        raise EmptyWindowError("dataset is empty")
    return max(1, int(data.height[-1]) // windows)


def _windows(data: Dataset, N: int):
    X = (int(data.height[0]) - 1) // N * N
    while X < int(data.height[-1]):
        yield X
        X += N


def build_report(figure: str, data: Dataset, window: int | None = None, params: ModelParams = DEFAULT_PARAMS) -> str:
    """CSV text for one figure id (see FIGURES)."""
    N = window or default_window(data)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if figure == "selmer-ratios":
        w.writerow(["X", "N", "n", "value", "sample_count", "model"])
        for X in _windows(data, N):
            for n in range(params.nmax + 1):
                try:
                    p = moving_theta(data, n, X, N)
                except EmptyWindowError:
                    continue
                mid = max(X + N / 2, 1.0)
                model = 1.0 - sum(theta(k, mid, params) for k in range(1, params.nmax + 1)) if n == 0 else theta(n, mid, params)
                w.writerow([X, N, n, repr(p.value), p.sample_count, repr(float(model))])
    elif figure == "hasse-ratios":
        w.writerow(["X", "N", "n", "value", "sample_count", "model"])
        for X in _windows(data, N):
            for n in range(2, params.nmax + 1):
                try:
                    p = moving_rho(data, n, X, N)
                except EmptyWindowError:
                    continue
                w.writerow([X, N, n, repr(p.value), p.sample_count, repr(float(rho(n, max(X + N / 2, 1.0), params)))])
    elif figure == "covariance":
        w.writerow(["X", "N", "n", "value", "model"])
        for X in _windows(data, N):
            for n in (4, 5):
                try:
                    c = estimate_cov11(data, n, X, N)
                except (EmptyWindowError, InsufficientSampleError):
                    continue
                w.writerow([X, N, n, repr(c), repr(params.cov11.get(n, 0.0))])
    elif figure == "average-rank":
        w.writerow(["X", "value", "sample_count", "model"])
        for p in moving_series(data, "avgrank", None, N):
            w.writerow([p.X + p.N, repr(p.value), p.sample_count, repr(predict_avg_rank(p.X + p.N, params))])
    elif figure == "rank-histogram":
        w.writerow(["X", "N", "n", "r", "observed", "predicted"])
        for X in _windows(data, N):
            win = data.window(X, N)
            sel, rk = data.selmer_rank[win], data.rank[win]
            for n in range(1, params.nmax + 1):
                mask = sel == n
                count = int(mask.sum())
                if count == 0:
                    continue
                probs, _ = rank_distribution(n, max(X + N / 2, 1.0), params)
                for r in range(n % 2, n + 1, 2):
                    w.writerow([X, N, n, r, int((rk[mask] == r).sum()), repr(count * probs[r])])
    elif figure == "curve-count":
        w.writerow(["X", "count", "model"])
        for X in _windows(data, N):
            top = X + N
            w.writerow([top, data.upto(top).stop, repr(KAPPA * top ** (5.0 / 6.0))])
    else:
        raise ValueError(f"unknown figure {figure!r}; choose from {', '.join(FIGURES)}")
    return buf.getvalue()
