"""File formats: curve census, curve datasets, ratio series, fits, predictions, params.

Every writer goes through atomic_write, which writes a temporary file in the
target directory and renames it into place.
"""

import csv
import json
import logging
import os
import tempfile
from array import array
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

import numpy as np

from .dataset import Dataset, DatasetValidationError, record_problem
from .rank_model import ModelParams

log = logging.getLogger(__name__)

DATASET_HEADER = ["height", "selmer_rank", "rank"]
CENSUS_HEADER = ["A", "B", "height"]
RATIO_HEADER = ["X", "N", "value", "sample_count"]
PREDICTION_HEADER = ["quantity", "r", "n", "X", "value", "error_band"]


class IngestError(ValueError):
    """A dataset file is malformed; the message names file and line."""


@contextmanager
def atomic_write(path, mode: str = "w"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rows_to_text(columns) -> str:
    stacked = np.column_stack(columns)
    if len(stacked) == 0:
        return ""
    return "\n".join(",".join(map(str, row)) for row in stacked.tolist()) + "\n"


def write_census(path, rows: np.ndarray) -> None:
    """Write (height, A, B) rows as `A,B,height` CSV."""
    with atomic_write(path) as fh:
        fh.write(",".join(CENSUS_HEADER) + "\n")
        if len(rows):
            fh.write(_rows_to_text([rows[:, 1], rows[:, 2], rows[:, 0]]))


def sidecar_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def write_dataset(path, data: Dataset, chunk: int = 1_000_000) -> None:
    """Write a dataset CSV and its metadata sidecar `<path>.meta.json`."""
    with atomic_write(path) as fh:
        fh.write(",".join(DATASET_HEADER) + "\n")
        for lo in range(0, len(data), chunk):
            sl = slice(lo, lo + chunk)
            fh.write(_rows_to_text([data.height[sl], data.selmer_rank[sl], data.rank[sl]]))
    if data.meta:
        with atomic_write(sidecar_path(path)) as fh:
            json.dump(data.meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def ingest_dataset(path) -> Dataset:
    """Read and validate a `height,selmer_rank,rank` CSV.

    Rows are parsed one at a time into compact integer arrays. Unsorted input
    is sorted by height (with a log notice).

    Raises:
        FileNotFoundError: if the file is missing.
        IngestError: on a bad header, an unparsable row, or a record with
            rank > selmer_rank or mismatched parity; the message names the line.
    """
    path = Path(path)
    heights, selmers, ranks = array("q"), array("q"), array("q")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{path}:1: file is empty, expected header {','.join(DATASET_HEADER)}")
        if [h.strip() for h in header] != DATASET_HEADER:
            raise IngestError(f"{path}:1: header must be exactly {','.join(DATASET_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise IngestError(f"{path}:{line_no}: expected 3 fields, got {len(row)}")
            try:
                h, n, r = (int(v) for v in row)
            except ValueError:
                raise IngestError(f"{path}:{line_no}: non-integer field in {row}") from None
            problem = record_problem(h, n, r)
            if problem:
                raise IngestError(f"{path}:{line_no}: {problem}")
            heights.append(h)
            selmers.append(n)
            ranks.append(r)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    h = np.frombuffer(heights, dtype=np.int64) if len(heights) else np.empty(0, dtype=np.int64)
    n = np.frombuffer(selmers, dtype=np.int64) if len(selmers) else np.empty(0, dtype=np.int64)
    r = np.frombuffer(ranks, dtype=np.int64) if len(ranks) else np.empty(0, dtype=np.int64)
    if len(h) > 1 and np.any(np.diff(h) < 0):
        log.warning("%s: rows are not sorted by height; sorting", path)
    try:
        return Dataset.from_arrays(h, n, r, meta=meta, validate=False)
    except DatasetValidationError as exc:  # pragma: no cover - rows were checked above
        raise IngestError(f"{path}: {exc}") from None


def write_ratio_series(path, points) -> None:
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATIO_HEADER)
        for p in points:
            w.writerow([p.X, p.N, repr(float(p.value)), p.sample_count])


def format_ratio_series(points) -> str:
    lines = [",".join(RATIO_HEADER)]
    lines += [f"{p.X},{p.N},{float(p.value)!r},{p.sample_count}" for p in points]
    return "\n".join(lines) + "\n"


def fit_record(n: int, model: str, params: dict, residual: float, point_count: int) -> dict:
    return {"n": n, "model": model, "params": params, "residual": residual, "point_count": point_count}


def write_json(path, obj) -> None:
    with atomic_write(path) as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def prediction_rows_text(rows) -> str:
    """CSV text for prediction rows (dicts keyed by PREDICTION_HEADER)."""
    lines = [",".join(PREDICTION_HEADER)]
    for row in rows:
        lines.append(",".join("" if row.get(k) is None else str(row[k]) for k in PREDICTION_HEADER))
    return "\n".join(lines) + "\n"


def load_params(spec: str | None) -> ModelParams:
    """Load params from a JSON path; None or "default" reads the shipped constants file."""
    if spec is None or spec == "default":
        text = resources.files("ranklab").joinpath("data/default_params.json").read_text()
        return ModelParams.from_dict(json.loads(text))
    return ModelParams.from_dict(json.loads(Path(spec).read_text()))


def save_params(path, params: ModelParams) -> None:
    write_json(path, params.to_dict())
