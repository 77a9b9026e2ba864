"""In-memory curve datasets: one (height, selmer_rank, rank) row per curve."""

from dataclasses import dataclass, field

import numpy as np


class DatasetValidationError(ValueError):
    """A record breaks rank <= selmer_rank or the parity rule."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class EmptyWindowError(ValueError):
    """A requested window holds no usable records."""


@dataclass(frozen=True)
class CurveRecord:
    height: int
    selmer_rank: int
    rank: int

    def __post_init__(self):
        problem = record_problem(self.height, self.selmer_rank, self.rank)
        if problem:
            raise DatasetValidationError(problem)


def record_problem(height: int, selmer_rank: int, rank: int) -> str | None:
    """Describe why a record is invalid, or return None when it is fine."""
    if height < 1:
        return f"height must be positive, got {height}"
    if selmer_rank < 0 or rank < 0:
        return "ranks must be nonnegative"
    if rank > selmer_rank:
        return f"rank {rank} exceeds Selmer rank {selmer_rank}"
    if (selmer_rank - rank) % 2:
        return f"rank {rank} and Selmer rank {selmer_rank} differ in parity"
    return None


@dataclass(frozen=True)
class Dataset:
    """Curves sorted by height, stored column-wise.

    Attributes:
        height: int64 heights, ascending.
        selmer_rank: int64 Selmer ranks.
        rank: int64 Mordell-Weil ranks.
        meta: free-form metadata (seed, params hash, ...).
    """

    height: np.ndarray
    selmer_rank: np.ndarray
    rank: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("height", "selmer_rank", "rank"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.height) == len(self.selmer_rank) == len(self.rank)):
            raise ValueError("columns differ in length")

    @classmethod
    def from_records(cls, records, meta: dict | None = None, validate: bool = True) -> "Dataset":
        rows = [(r.height, r.selmer_rank, r.rank) if isinstance(r, CurveRecord) else tuple(r) for r in records]
        arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
        return cls.from_arrays(arr[:, 0], arr[:, 1], arr[:, 2], meta=meta, validate=validate)

    @classmethod
    def from_arrays(cls, height, selmer_rank, rank, meta: dict | None = None, validate: bool = True) -> "Dataset":
        height = np.asarray(height, dtype=np.int64)
        selmer_rank = np.asarray(selmer_rank, dtype=np.int64)
        rank = np.asarray(rank, dtype=np.int64)
        if validate:
            bad = (height < 1) | (rank < 0) | (rank > selmer_rank) | ((selmer_rank - rank) % 2 != 0)
            if bad.any():
                i = int(np.argmax(bad))
                raise DatasetValidationError(
                    record_problem(int(height[i]), int(selmer_rank[i]), int(rank[i])), row=i + 1
                )
        if len(height) > 1 and np.any(np.diff(height) < 0):
            order = np.argsort(height, kind="stable")
            height, selmer_rank, rank = height[order], selmer_rank[order], rank[order]
        return cls(height, selmer_rank, rank, dict(meta or {}))

    def __len__(self) -> int:
        return len(self.height)

    def window(self, X: int, N: int) -> slice:
        """Index range of the records with height in (X, X + N]."""
        lo = int(np.searchsorted(self.height, X, side="right"))
        hi = int(np.searchsorted(self.height, X + N, side="right"))
        return slice(lo, hi)

    def upto(self, X: int) -> slice:
        return slice(0, int(np.searchsorted(self.height, X, side="right")))

    def records(self):
        for h, n, r in zip(self.height.tolist(), self.selmer_rank.tolist(), self.rank.tolist()):
            yield CurveRecord(h, n, r)
