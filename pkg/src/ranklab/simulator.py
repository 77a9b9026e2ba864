"""Monte Carlo generation of test elliptic curves.

A test curve is a triple (height, Selmer rank n, symbols) where each of the
floor(n/2) symbols is either "MW" (a Selmer element coming from a rational
point) or "SHA" (an element of Sha). Its rank is (n mod 2) + 2 * #MW.

Heights run over the integers 1..max_height. In deterministic mode height X
receives floor(kappa X^(5/6)) - floor(kappa (X-1)^(5/6)) curves, so the
cumulative count is exactly floor(kappa X^(5/6)). In Bernoulli mode height X
receives one curve with probability min(1, (5 kappa / 6) X^(-1/6)).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .constants import KAPPA
from .dataset import Dataset
from .rank_model import DEFAULT_PARAMS, ModelParams, covariance_window, rho, theta, theta_zero

MW = "MW"
SHA = "SHA"
COUNT_MODES = ("deterministic", "bernoulli")
CHUNK_HEIGHTS = 1 << 20


class SimulationCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class TestCurve:
    __test__ = False  # keep pytest from collecting this class

    height: int
    selmer_rank: int
    symbols: tuple = ()

    def __post_init__(self):
        if self.height < 1 or self.selmer_rank < 0:
            raise ValueError("height must be positive and Selmer rank nonnegative")
        if len(self.symbols) != self.selmer_rank // 2:
            raise ValueError(f"Selmer rank {self.selmer_rank} needs {self.selmer_rank // 2} symbols")
        for sym in self.symbols:
            if sym not in (MW, SHA):
                raise ValueError(f"unknown symbol {sym!r}")


@dataclass(frozen=True)
class SimConfig:
    max_height: int
    seed: int
    params: ModelParams = field(default_factory=lambda: DEFAULT_PARAMS)
    count_mode: str = "deterministic"

    def __post_init__(self):
        if self.max_height < 0:
            raise ValueError("max_height must be nonnegative")
        if self.count_mode not in COUNT_MODES:
            raise ValueError(f"count_mode must be one of {COUNT_MODES}")


@dataclass(frozen=True)
class RngState:
    """Key of one curve's random stream."""

    seed: int
    index: int = 0


def rank_of(curve: TestCurve) -> int:
    return curve.selmer_rank % 2 + 2 * sum(1 for s in curve.symbols if s == MW)


def cumulative_count(X) -> np.ndarray:
    """floor(kappa X^(5/6)) for an array of heights."""
    X = np.asarray(X, dtype=np.float64)
    return np.floor(KAPPA * X ** (5.0 / 6.0)).astype(np.int64)


def curves_at_height(X, mode: str = "deterministic", seed: int = 0):
    """Number of test curves placed at height X (scalar or array)."""
    X_arr = np.atleast_1d(np.asarray(X, dtype=np.int64))
    if np.any(X_arr < 1):
        raise ValueError("heights start at 1")
    if mode == "deterministic":
        counts = cumulative_count(X_arr) - cumulative_count(X_arr - 1)
    elif mode == "bernoulli":
        p = np.minimum(1.0, (5.0 * KAPPA / 6.0) * X_arr.astype(np.float64) ** (-1.0 / 6.0))
        counts = (rng.uniforms(seed, X_arr, 0, rng.DRAW_COUNT) < p).astype(np.int64)
    else:
        raise ValueError(f"unknown count mode {mode!r}")
    if np.ndim(X) == 0:
        return int(counts[0])
    return counts


def _draw(heights: np.ndarray, index: np.ndarray, seed: int, params: ModelParams):
    """Selmer ranks and MW-symbol counts for curves with the given keys."""
    H = heights.astype(np.float64)
    u_sel = rng.uniforms(seed, heights, index, rng.DRAW_SELMER)
    u_sym = rng.uniforms(seed, heights, index, rng.DRAW_SYMBOLS)

    probs = [theta_zero(H, params)] + [theta(n, H, params) for n in range(1, params.nmax + 1)]
    selmer = np.zeros(len(heights), dtype=np.int64)
    edge = np.zeros(len(heights))
    for n in range(params.nmax):
        edge = edge + probs[n]
        selmer += u_sel >= edge

    n_mw = np.zeros(len(heights), dtype=np.int64)
    for n in range(2, params.nmax + 1):
        sel = selmer == n
        if not sel.any():
            continue
        r = rho(n, H[sel], params)
        u = u_sym[sel]
        if n // 2 == 1:
            n_mw[sel] = u < r
        else:
            lo, hi = covariance_window(r)
            c = np.clip(params.cov11.get(n, 0.0), lo, hi)
            p11 = r * r + c
            p10 = r * (1.0 - r) - c
            # outcomes in order (MW, MW), (MW, SHA), (SHA, MW), (SHA, SHA)
            n_mw[sel] = np.where(u < p11, 2, np.where(u < p11 + 2.0 * p10, 1, 0))
    return selmer, n_mw, u_sym


def sample_test_curve(X: int, rng_state: RngState, params: ModelParams = DEFAULT_PARAMS) -> TestCurve:
    """Draw one test curve at height X from the stream keyed by (seed, X, index)."""
    if X < 1:
        raise ValueError("heights start at 1")
    heights = np.array([X], dtype=np.int64)
    index = np.array([rng_state.index], dtype=np.int64)
    selmer, n_mw, u_sym = _draw(heights, index, rng_state.seed, params)
    n, k = int(selmer[0]), int(n_mw[0])
    m = n // 2
    if m == 2 and k == 1:
        # the one-MW band is [p11, p11 + 2 p10) and p11 + p10 = rho
        symbols = (MW, SHA) if u_sym[0] < rho(n, float(X), params) else (SHA, MW)
    else:
        symbols = tuple([MW] * k + [SHA] * (m - k))
    return TestCurve(X, n, symbols)


def _simulate_chunk(lo: int, hi: int, config: SimConfig):
    heights = np.arange(lo, hi + 1, dtype=np.int64)
    counts = curves_at_height(heights, config.count_mode, config.seed)
    total = int(counts.sum())
    h = np.repeat(heights, counts)
    starts = np.cumsum(counts) - counts
    index = np.arange(total, dtype=np.int64) - np.repeat(starts, counts)
    selmer, n_mw, _ = _draw(h, index, config.seed, config.params)
    return h, selmer, selmer % 2 + 2 * n_mw


def expected_curve_count(config: SimConfig) -> int:
    """Expected number of curves (exact in deterministic mode)."""
    if config.max_height < 1:
        return 0
    return int(cumulative_count(config.max_height))


def _threads(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("RANKLAB_THREADS")
    return max(1, int(env)) if env else 1


def simulate_sequence(config: SimConfig, cap: int = 50_000_000, workers: int | None = None) -> Dataset:
    """Generate every test curve of height 1..max_height.

    Work is split into fixed height chunks; each curve depends only on its
    key, so the result is identical for any number of workers.

    Raises:
        SimulationCapError: if more than cap curves would be produced.
    """
    expected = expected_curve_count(config)
    if expected > cap:
        raise SimulationCapError(f"{expected} curves requested, cap is {cap}")
    meta = {
        "seed": config.seed,
        "max_height": config.max_height,
        "params_hash": config.params.params_hash(),
        "count_mode": config.count_mode,
        "nmax_modeled": config.params.nmax,
    }
    if config.max_height < 1:
        empty = np.empty(0, dtype=np.int64)
        return Dataset(empty, empty, empty, meta)
    bounds = [
        (lo, min(lo + CHUNK_HEIGHTS - 1, config.max_height))
        for lo in range(1, config.max_height + 1, CHUNK_HEIGHTS)
    ]
    nworkers = _threads(workers)
    if nworkers == 1 or len(bounds) == 1:
        parts = [_simulate_chunk(lo, hi, config) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            parts = list(pool.map(lambda b: _simulate_chunk(b[0], b[1], config), bounds))
    h = np.concatenate([p[0] for p in parts])
    n = np.concatenate([p[1] for p in parts])
    r = np.concatenate([p[2] for p in parts])
    return Dataset(h, n, r, meta)
