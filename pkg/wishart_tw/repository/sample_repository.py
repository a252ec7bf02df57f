"""
File I/O for the harness: Monte Carlo sample dumps, user matrices for the PCA test,
result tables (CSV) and their JSON sidecars.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np
import pandas as pd

from wishart_tw.errors import InputFileError
from wishart_tw.service.wishart_service import EigenSample

logger = logging.getLogger(__name__)

DUMP_META = ["n", "p", "k", "field", "path", "seed"]


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, Path):
        return str(o)
    return str(o)


def _fmt(value, float_format: str):
    if isinstance(value, (float, np.floating)):
        return float_format % value
    return value


# ----------------------- Tables -----------------------

def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]], float_format: str = "%.6f") -> str:
    """Write rows to CSV with every float rendered through ``float_format``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v, float_format) for v in r])
    return str(path)


def save_json(path, meta: dict, data) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump({"meta": meta, "data": data}, f, ensure_ascii=False, indent=2, default=_json_default)
    return str(path)


# ----------------------- Sample dumps -----------------------

def write_sample_dump(path, samples: Sequence[EigenSample]) -> str:
    """One row per draw: n, p, k, field, path, seed, then l_1 ... l_k."""
    if not samples:
        raise ValueError("nothing to dump")
    k = max(s.k for s in samples)
    header = DUMP_META + [f"l{i + 1}" for i in range(k)]
    rows = []
    for s in samples:
        values = [float(v) for v in s.top] + [""] * (k - s.k)
        rows.append([s.n, s.p, s.k, s.field, s.path, s.seed] + values)
    out = write_csv(path, header, rows, float_format="%.17g")
    logger.info("Wrote %d draws to %s", len(samples), out)
    return out


def read_sample_dump(path) -> List[EigenSample]:
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype={"field": str, "path": str, "seed": str})
    except FileNotFoundError as e:
        raise InputFileError(f"sample dump not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise InputFileError(f"cannot parse sample dump {path}: {e}") from e

    missing = [c for c in DUMP_META if c not in df.columns]
    if missing:
        raise InputFileError(f"sample dump {path} lacks columns {missing}")
    value_cols = [c for c in df.columns if c not in DUMP_META]

    samples = []
    for i, row in enumerate(df.itertuples(index=False)):
        rec = row._asdict()
        try:
            k = int(rec["k"])
            top = np.array([float(rec[c]) for c in value_cols[:k]])
            seed = int(rec["seed"])
            n, p = int(rec["n"]), int(rec["p"])
        except (TypeError, ValueError) as e:
            raise InputFileError(f"bad row {i + 1} in {path}: {e}") from e
        if len(top) != k or not np.all(np.isfinite(top)):
            raise InputFileError(f"row {i + 1} in {path} does not carry {k} finite eigenvalues")
        samples.append(EigenSample(top=top, n=n, p=p, k=k, field=rec["field"], seed=seed, path=rec["path"]))
    return samples


# ----------------------- User matrices -----------------------

def read_matrix_csv(path) -> np.ndarray:
    """
    Dense real matrix from CSV, rows = observations. A non-numeric first line is
    taken as a header. Ragged rows or missing/non-numeric cells raise InputFileError.
    """
    path = Path(path)
    try:
        raw = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True)
    except FileNotFoundError as e:
        raise InputFileError(f"matrix file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputFileError(f"cannot parse matrix file {path}: {e}") from e

    numeric = raw.apply(pd.to_numeric, errors="coerce")
    if len(numeric) > 1 and numeric.iloc[0].isna().all():
        numeric = numeric.iloc[1:]
    if numeric.empty:
        raise InputFileError(f"matrix file {path} holds no data")
    if numeric.isna().any().any():
        bad = int(numeric.isna().any(axis=1).to_numpy().argmax())
        raise InputFileError(f"matrix file {path} is ragged or has non-numeric cells (data row {bad + 1})")
    return numeric.to_numpy(dtype=float)
