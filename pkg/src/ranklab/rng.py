"""Counter-based uniforms keyed by (seed, height, curve index, draw index).

Every random number is a pure function of its key, so any slice of a
simulation can be regenerated on its own and the output does not depend on
how work is split between threads. The mixing step is the splitmix64
finalizer, applied once per key component.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)

# draw indices used by the simulator
DRAW_SELMER = 0
DRAW_SYMBOLS = 1
DRAW_COUNT = 2


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _S30)
    z = z * _M1
    z = z ^ (z >> _S27)
    z = z * _M2
    return z ^ (z >> _S31)


def hash_keys(seed: int, height, index, draw: int) -> np.ndarray:
    """64-bit hash of each key; height and index broadcast against each other."""
    with np.errstate(over="ignore"):
        state = np.full(1, np.uint64(seed & 0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        state = _mix(state + _GOLDEN)
        h = np.asarray(height, dtype=np.int64).astype(np.uint64)
        i = np.asarray(index, dtype=np.int64).astype(np.uint64)
        state = _mix((state ^ h) + _GOLDEN)
        state = _mix((state ^ i) + _GOLDEN)
        state = _mix((state ^ np.uint64(draw)) + _GOLDEN)
    return state


def uniforms(seed: int, height, index, draw: int) -> np.ndarray:
    """Uniform doubles in [0, 1) with 53 random bits each."""
    return (hash_keys(seed, height, index, draw) >> _S11).astype(np.float64) * _INV53
