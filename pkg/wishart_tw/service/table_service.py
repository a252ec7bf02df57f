"""
Quantile tables and the PCA null test.

build_table simulates l_1 for each requested shape, standardizes it and evaluates the
empirical CDF at the Tracy-Widom reference quantiles. The published columns are kept
in REFERENCE_TABLES so reports can show the deviation next to each simulated column.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from tabulate import tabulate

from wishart_tw.errors import DomainError, WishartTwError
from wishart_tw.service import tracy_widom_service as tw_service
from wishart_tw.service.wishart_service import (
    FIELDS,
    MonteCarloService,
    canonical_variant,
    empirical_cdf,
    scaling,
    top_eigenvalues,
)
from wishart_tw.settings import TABLE_QUANTILES, Settings

logger = logging.getLogger(__name__)

TW_PROBABILITIES = (0.01, 0.05, 0.10, 0.30, 0.50, 0.70, 0.90, 0.95, 0.99)

# published empirical CDFs at TABLE_QUANTILES, adjusted centering, real matrices
REFERENCE_COLUMNS: Dict[Tuple[int, int], Tuple[float, ...]] = {
    (10, 1000): (0.009, 0.047, 0.102, 0.303, 0.506, 0.705, 0.904, 0.953, 0.992),
    (10, 4000): (0.010, 0.050, 0.107, 0.308, 0.506, 0.704, 0.904, 0.951, 0.990),
    (10, 10000): (0.015, 0.060, 0.112, 0.316, 0.522, 0.723, 0.913, 0.958, 0.992),
    (100, 4000): (0.012, 0.053, 0.103, 0.304, 0.508, 0.706, 0.901, 0.951, 0.991),
    (30, 5000): (0.013, 0.055, 0.105, 0.303, 0.503, 0.702, 0.904, 0.953, 0.991),
    (50, 5000): (0.010, 0.053, 0.104, 0.309, 0.502, 0.705, 0.899, 0.949, 0.991),
    (50, 20000): (0.017, 0.067, 0.125, 0.331, 0.522, 0.718, 0.905, 0.955, 0.992),
    (50, 50000): (0.021, 0.079, 0.139, 0.345, 0.538, 0.727, 0.911, 0.957, 0.992),
    (5, 200): (0.008, 0.047, 0.094, 0.293, 0.500, 0.714, 0.911, 0.959, 0.994),
    (5, 2000): (0.014, 0.057, 0.110, 0.314, 0.506, 0.712, 0.906, 0.951, 0.992),
    (5, 20000): (0.018, 0.069, 0.120, 0.320, 0.519, 0.710, 0.907, 0.954, 0.992),
    (5, 5): (0.000, 0.003, 0.022, 0.217, 0.464, 0.702, 0.903, 0.949, 0.988),
    (10, 10): (0.002, 0.018, 0.054, 0.257, 0.486, 0.703, 0.903, 0.950, 0.990),
    (100, 100): (0.008, 0.043, 0.090, 0.295, 0.497, 0.700, 0.901, 0.950, 0.991),
    (5, 20): (0.001, 0.019, 0.056, 0.262, 0.490, 0.702, 0.905, 0.952, 0.989),
    (10, 40): (0.004, 0.032, 0.077, 0.279, 0.494, 0.707, 0.906, 0.953, 0.990),
    (100, 400): (0.008, 0.044, 0.095, 0.294, 0.489, 0.702, 0.899, 0.949, 0.990),
}

REFERENCE_TABLES: Dict[str, List[Tuple[int, int]]] = {
    "table1": [(10, 1000), (10, 4000), (10, 10000), (100, 4000), (30, 5000),
               (50, 5000), (50, 20000), (50, 50000), (5, 200), (5, 2000), (5, 20000)],
    "table2": [(5, 5), (10, 10), (100, 100), (5, 20), (10, 40), (100, 400)],
}

VARIANCE_TOLERANCE = 0.2


@dataclass
class ExperimentConfig:
    dims: List[Tuple[int, int]]
    reps: int = 10_000
    variant: str = "adjusted"
    field: str = "real"
    seed: int = 20240601
    workers: int = 1
    reference_quantiles: Tuple[float, ...] = TABLE_QUANTILES
    path: str = "auto"

    def __post_init__(self):
        self.dims = [(int(a), int(b)) for a, b in self.dims]
        self.reference_quantiles = tuple(float(q) for q in self.reference_quantiles)
        if not self.dims:
            raise DomainError("dims must not be empty")
        if self.reps < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        self.variant = canonical_variant(self.variant)
        if self.field not in FIELDS:
            raise DomainError(f"field must be one of {FIELDS}, got {self.field!r}")
        if list(self.reference_quantiles) != sorted(self.reference_quantiles):
            raise DomainError("reference_quantiles must be sorted ascending")
        if self.path not in ("auto", "dense", "tridiagonal"):
            raise DomainError(f"unknown path {self.path!r}")
        if self.path == "tridiagonal" and self.field == "complex":
            raise DomainError("the tridiagonal path is only available for real matrices")

    @property
    def which(self) -> str:
        return "TW1" if self.field == "real" else "TW2"

    @property
    def sampling_path(self) -> str:
        if self.path != "auto":
            return self.path
        return "tridiagonal" if self.field == "real" else "dense"

    def to_dict(self) -> dict:
        return {
            "dims": [list(d) for d in self.dims],
            "reps": self.reps,
            "variant": self.variant,
            "field": self.field,
            "seed": self.seed,
            "workers": self.workers,
            "reference_quantiles": list(self.reference_quantiles),
            "path": self.sampling_path,
        }


def column_seed(master_seed: int, n: int, p: int) -> int:
    """Seed of one table column; depends only on the master seed and the shape."""
    return int(np.random.SeedSequence([int(master_seed), int(n), int(p)]).generate_state(1, dtype=np.uint64)[0])


def label(dims: Tuple[int, int]) -> str:
    return f"{dims[0]}x{dims[1]}"


@dataclass
class TableResult:
    config: ExperimentConfig
    tw_column: List[float]
    columns: Dict[str, Optional[List[float]]] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)
    durations: Dict[str, float] = field(default_factory=dict)

    def csv_header(self) -> List[str]:
        return ["quantile", "tw_cdf"] + [label(d) for d in self.config.dims]

    def csv_rows(self) -> List[list]:
        rows = []
        for i, q in enumerate(self.config.reference_quantiles):
            row = [float(q), float(self.tw_column[i])]
            for d in self.config.dims:
                col = self.columns.get(label(d))
                row.append("" if col is None else float(col[i]))
            rows.append(row)
        return rows


@dataclass(frozen=True)
class PcaReport:
    n: int
    p: int
    l1: float
    mu: float
    sigma: float
    s: float
    p_value: float
    variant: str
    variance_warning: bool
    column_variance_range: Tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n, "p": self.p, "l1": self.l1, "mu": self.mu, "sigma": self.sigma,
            "s": self.s, "p_value": self.p_value, "variant": self.variant,
            "variance_warning": self.variance_warning,
            "column_variance_range": list(self.column_variance_range),
        }


class TableService:
    """
    Service class for the quantile-table reproductions and the PCA null test
    """

    def __init__(self, settings: Optional[Settings] = None, show_progress: bool = False):
        self.settings = settings or Settings.from_env()
        self.show_progress = show_progress

    def _tw(self, which: str) -> tw_service.TwCdf:
        return tw_service.tw_cdf(which, self.settings)

    def build_table(self, config: ExperimentConfig) -> TableResult:
        tw = self._tw(config.which)
        tw_column = [float(v) for v in tw_service.cdf(tw, np.asarray(config.reference_quantiles))]
        result = TableResult(config=config, tw_column=tw_column)
        runner = MonteCarloService(workers=config.workers, show_progress=self.show_progress)

        for dims in config.dims:
            n, p = dims
            name = label(dims)
            start = time.time()
            try:
                scale = scaling(n, p, config.variant)
                samples = runner.run(
                    n, p, config.reps, k=1, field=config.field,
                    seed=column_seed(config.seed, n, p), path=config.sampling_path,
                )
                ecdf = empirical_cdf(samples, scale)
                result.columns[name] = [float(v) for v in ecdf.evaluate(np.asarray(config.reference_quantiles))]
            except WishartTwError as e:
                logger.error("Column %s failed: %s", name, e)
                result.columns[name] = None
                result.errors[name] = str(e)
            result.durations[name] = round(time.time() - start, 3)
        return result

    def print_table(self, result: TableResult) -> None:
        config = result.config
        print("=" * 70)
        print(f"TRACY-WIDOM APPROXIMATION ({config.which}, {config.variant} centering, "
              f"{config.reps:,} reps, {config.field})")
        print("=" * 70)

        header = ["Quantile", config.which]
        for d in config.dims:
            header.append(label(d))
            if reference_column(d) is not None and config.field == "real":
                header += ["published", "|diff|"]
        rows = [header]
        for i, q in enumerate(config.reference_quantiles):
            row = [f"{q:.2f}", f"{result.tw_column[i]:.3f}"]
            for d in config.dims:
                col = result.columns.get(label(d))
                row.append("error" if col is None else f"{col[i]:.3f}")
                if reference_column(d) is not None and config.field == "real":
                    published = self._published(d, q)
                    row.append("" if published is None else f"{published:.3f}")
                    row.append("" if published is None or col is None else f"{abs(col[i] - published):.3f}")
            rows.append(row)
        print(tabulate(rows, headers="firstrow", tablefmt="grid"))

        for name, message in result.errors.items():
            print(f"Column {name} failed: {message}")

    @staticmethod
    def _published(dims: Tuple[int, int], q: float) -> Optional[float]:
        for ref_q, value in zip(TABLE_QUANTILES, reference_column(dims)):
            if abs(ref_q - q) < 1e-9:
                return value
        return None

    def pca_test(self, x: np.ndarray, variant: str = "adjusted") -> PcaReport:
        """
        Largest-root test of the white null on data X (rows = observations): l_1 of X*X
        standardized by ``variant`` and referred to TW1. Columns are not rescaled; a
        warning is raised when a column's second moment is more than 20% away from 1.
        """
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.size == 0:
            raise DomainError(f"expected a non-empty 2-D matrix, got shape {x.shape}")
        n, p = x.shape
        scale = scaling(n, p, variant)
        l1 = float(max(top_eigenvalues(x, 1)[0], 0.0))
        s = (l1 - scale.mu) / scale.sigma
        p_value = 1.0 - tw_service.cdf(self._tw("TW1"), s)

        second_moments = np.mean(x * x, axis=0)
        lo, hi = float(second_moments.min()), float(second_moments.max())
        warning = bool(np.any(np.abs(second_moments - 1.0) > VARIANCE_TOLERANCE))
        if warning:
            logger.warning(
                "Column second moments span [%.3f, %.3f]; the null assumes unit variance", lo, hi
            )
        return PcaReport(
            n=n, p=p, l1=l1, mu=scale.mu, sigma=scale.sigma, s=float(s),
            p_value=float(p_value), variant=variant, variance_warning=warning,
            column_variance_range=(lo, hi),
        )

    def print_pca_report(self, report: PcaReport) -> None:
        print("=" * 60)
        print("PCA NULL TEST: largest eigenvalue vs TW1")
        print("=" * 60)
        rows = [
            ["Metric", "Value"],
            ["Shape (n x p)", f"{report.n} x {report.p}"],
            ["l_1", f"{report.l1:.6f}"],
            [f"mu ({report.variant})", f"{report.mu:.6f}"],
            [f"sigma ({report.variant})", f"{report.sigma:.6f}"],
            ["s = (l_1 - mu)/sigma", f"{report.s:.6f}"],
            ["p-value 1 - F1(s)", f"{report.p_value:.6f}"],
            ["Column 2nd moments", f"{report.column_variance_range[0]:.3f} .. {report.column_variance_range[1]:.3f}"],
        ]
        print(tabulate(rows, headers="firstrow", tablefmt="grid"))
        if report.variance_warning:
            print("WARNING: column variances deviate from 1 by more than 20%; standardize the data first.")


def reference_column(dims: Sequence[int]) -> Optional[Tuple[float, ...]]:
    """Published empirical CDF column for ``dims`` in either orientation."""
    a, b = dims
    return REFERENCE_COLUMNS.get((a, b)) or REFERENCE_COLUMNS.get((b, a))
