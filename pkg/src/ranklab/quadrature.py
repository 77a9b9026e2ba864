"""Adaptive Simpson integration of g(H) H^(-1/6) over a height range.

With u = H^(5/6) the integral becomes the integral of (6/5) g(u^(6/5)) du,
which has no singularity at H = 0. The u-range is cut into panels at
decades of u (and at any caller breakpoints, e.g. kinks of g). Each panel is
integrated by adaptive Simpson with Richardson correction.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable


class QuadratureError(RuntimeError):
    """Subdivision hit max_depth before reaching the tolerance."""

    def __init__(self, estimate: float, error: float):
        super().__init__(f"max depth reached; estimate {estimate!r} with error about {error:.3g}")
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 60
    min_depth: int = 3

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_SPEC = QuadratureSpec()


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float, max_depth: int = 60, min_depth: int = 3):
    """Integrate f over [a, b] to absolute tolerance tol.

    Returns:
        (value, error_estimate).

    Raises:
        QuadratureError: if some subinterval needs more than max_depth halvings.
    """
    if a == b:
        return 0.0, 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    parts: list[float] = []
    errs: list[float] = []
    overflow = False
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = (mid - lo) * (flo + 4.0 * fl + fmid) / 6.0
        right = (hi - mid) * (fmid + 4.0 * fr + fhi) / 6.0
        delta = left + right - s
        if depth >= min_depth and abs(delta) <= 15.0 * eps or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                overflow = True
            parts.append(left + right + delta / 15.0)
            errs.append(abs(delta) / 15.0)
            continue
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
    value, err = math.fsum(parts), math.fsum(errs)
    if overflow:
        raise QuadratureError(value, err)
    return value, err


def _panel_edges(u_lo: float, u_hi: float, extra: Iterable[float]) -> list[float]:
    edges = {u_lo, u_hi}
    k = math.floor(math.log10(u_lo)) + 1 if u_lo > 0 else 0
    while 10.0**k < u_hi:
        if 10.0**k > u_lo:
            edges.add(10.0**k)
        k += 1
    for u in extra:
        if u_lo < u < u_hi:
            edges.add(u)
    return sorted(edges)


def integrate_density(
    g: Callable[[float], float],
    X_lo: float,
    X_hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integral of g(H) H^(-1/6) dH over [X_lo, X_hi].

    Args:
        g: Integrand factor, bounded on the range.
        X_lo: Lower limit, >= 0.
        X_hi: Upper limit, > X_lo.
        spec: Tolerances; rel_tol applies to each panel's own value.
        breakpoints: Heights where g has a kink and a panel edge should sit.

    Raises:
        QuadratureError: if a panel cannot reach the tolerance.
    """
    if not 0 <= X_lo < X_hi:
        raise ValueError(f"need 0 <= X_lo < X_hi, got [{X_lo}, {X_hi}]")
    u_lo, u_hi = X_lo ** (5.0 / 6.0), X_hi ** (5.0 / 6.0)
    edges = _panel_edges(u_lo, u_hi, (max(h, 0.0) ** (5.0 / 6.0) for h in breakpoints))

    def h(u: float) -> float:
        return 1.2 * g(u**1.2)

    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        # coarse pass to size the tolerance for this panel
        n = 8
        step = (b - a) / n
        coarse = step / 3.0 * sum((1 if i in (0, n) else 4 if i % 2 else 2) * h(a + i * step) for i in range(n + 1))
        tol = max(spec.abs_tol, spec.rel_tol * abs(coarse))
        val, _ = adaptive_simpson(h, a, b, tol, spec.max_depth, spec.min_depth)
        total.append(val)
    return math.fsum(total)
