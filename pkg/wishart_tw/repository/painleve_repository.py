"""
On-disk cache for tabulated Hastings-McLeod solutions.

One CSV table per (s_min, s_max, tol, integrator version); the key is encoded in the
file name so stale tables from an older integrator are simply never found.
"""

import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

COLUMNS = ("s", "q", "qprime", "I1", "I2", "J")


class PainleveRepository:
    """
    Repository for Painleve tables stored under ``cache_dir``.

    ``load`` returns a mapping column -> array or None on a miss; a table that cannot
    be parsed counts as a miss and is logged, never raised, since it can be rebuilt.
    """

    def __init__(self, cache_dir, integrator_version: str = "1"):
        self.cache_dir = Path(cache_dir)
        self.integrator_version = integrator_version

    def path_for(self, s_min: float, s_max: float, tol: float) -> Path:
        name = f"painleve_v{self.integrator_version}_{s_min:+.4f}_{s_max:+.4f}_{tol:.0e}.csv"
        return self.cache_dir / name

    def load(self, s_min: float, s_max: float, tol: float) -> Optional[Dict[str, np.ndarray]]:
        path = self.path_for(s_min, s_max, tol)
        if not path.exists():
            logger.info("Painleve cache miss: %s", path.name)
            return None
        try:
            df = pd.read_csv(path, dtype=float)
        except (OSError, ValueError, pd.errors.ParserError) as e:
            logger.warning("Ignoring unreadable Painleve cache %s: %s", path, e)
            return None
        if tuple(df.columns) != COLUMNS or df.isna().any().any() or len(df) < 2:
            logger.warning("Ignoring malformed Painleve cache %s", path)
            return None
        logger.info("Painleve cache hit: %s (%d rows)", path.name, len(df))
        return {col: df[col].to_numpy() for col in COLUMNS}

    def save(self, s_min: float, s_max: float, tol: float, table: Dict[str, np.ndarray]) -> Path:
        path = self.path_for(s_min, s_max, tol)
        path.parent.mkdir(parents=True, exist_ok=True)
        df = pd.DataFrame({col: np.asarray(table[col], dtype=float) for col in COLUMNS})
        tmp = path.with_suffix(".tmp")
        df.to_csv(tmp, index=False, float_format="%.17g")
        tmp.replace(path)
        logger.info("Painleve table written to %s", path)
        return path
