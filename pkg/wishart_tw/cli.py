#!/usr/bin/env python3
"""
Command-line harness.

    python -m wishart_tw table --dims 5x200,10x1000 --reps 10000 --out results/table1.csv
    python -m wishart_tw tw TW1 quantile 0.95
    python -m wishart_tw pca-test data.csv --variant adjusted
    python -m wishart_tw verify identities --out results/identities.json
    python -m wishart_tw sample-dump --dims 20x5 --reps 1000 --out samples.csv

Exit codes: 0 success, 1 verification failure, 2 domain error, 3 input file error,
4 numerical failure.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy
from tabulate import tabulate

import wishart_tw
from wishart_tw.errors import DomainError, InputFileError, NumericError, VerificationFailure
from wishart_tw.repository.sample_repository import (
    read_matrix_csv,
    read_sample_dump,
    save_json,
    write_csv,
    write_sample_dump,
)
from wishart_tw.service import tracy_widom_service as tw_service
from wishart_tw.service.special_functions import ShapeParams
from wishart_tw.service.table_service import (
    REFERENCE_TABLES,
    ExperimentConfig,
    PcaReport,
    TableResult,
    TableService,
)
from wishart_tw.service.wishart_service import MonteCarloService, empirical_cdf, scaling
from wishart_tw.settings import TABLE_QUANTILES, Settings, configure_logging
from wishart_tw.validator import convergence_validator as cv
from wishart_tw.validator.convergence_validator import ConvergenceReport, make_report
from wishart_tw.validator.identity_validator import (
    check_identities,
    cphi_closed_form,
    laguerre_moment_closed_form,
    laguerre_moment_quadrature,
)

logger = logging.getLogger("wishart_tw")

SUITES = ("identities", "cphi", "convergence", "kernels")
EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3, 4


def _versions() -> dict:
    return {"wishart_tw": wishart_tw.__version__, "numpy": np.__version__, "scipy": scipy.__version__}


def parse_dims(text: str) -> List[Tuple[int, int]]:
    """'5x200,10x1000' -> [(5, 200), (10, 1000)]"""
    dims = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            a, b = part.split("x")
            dims.append((int(a), int(b)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dimension pair {part!r}; expected e.g. 5x200")
    if not dims:
        raise argparse.ArgumentTypeError("no dimension pairs given")
    return dims


# ----------------------- Sub-commands -----------------------

def cmd_table(config: ExperimentConfig, out: Optional[str] = None,
              settings: Optional[Settings] = None, show_progress: bool = False) -> TableResult:
    service = TableService(settings, show_progress=show_progress)
    start = time.time()
    result = service.build_table(config)
    service.print_table(result)

    if out:
        csv_path = write_csv(out, result.csv_header(), result.csv_rows())
        meta = {
            "config": config.to_dict(),
            "which": config.which,
            "versions": _versions(),
            "duration_sec": round(time.time() - start, 3),
            "column_durations_sec": result.durations,
            "errors": result.errors,
        }
        data = [dict(zip(result.csv_header(), row)) for row in result.csv_rows()]
        json_path = save_json(Path(out).with_suffix(".json"), meta, data)
        print(f"Results saved to: {csv_path} (+ {json_path})")
    return result


def cmd_tw(which: str, mode: str, value: float, settings: Optional[Settings] = None) -> float:
    tw = tw_service.tw_cdf(which, settings)
    if mode == "cdf":
        result = tw_service.cdf(tw, float(value))
    elif mode == "quantile":
        result = tw_service.quantile(tw, float(value))
    else:
        raise DomainError(f"mode must be 'cdf' or 'quantile', got {mode!r}")
    print(f"{result:.6f}")
    return result


def cmd_pca_test(input_path: str, variant: str = "adjusted", out: Optional[str] = None,
                 settings: Optional[Settings] = None) -> PcaReport:
    x = read_matrix_csv(input_path)
    service = TableService(settings)
    report = service.pca_test(x, variant)
    service.print_pca_report(report)
    if out:
        save_json(out, {"input": str(input_path), "versions": _versions()}, report.to_dict())
    return report


def _identity_reports(draws: int = 200, seed: int = 7) -> List[ConvergenceReport]:
    rng = np.random.default_rng(seed)
    pairs, devs = [], {"lambda_beta2": [], "kappa_over_mu": [], "turning_product": [], "turning_sum": []}
    while len(pairs) < draws:
        n = int(np.exp(rng.uniform(np.log(4), np.log(1e6))))
        N = int(np.exp(rng.uniform(np.log(2), np.log(n - 1))))
        if not 2 <= N < n:
            continue
        report = check_identities(ShapeParams(n, N))
        pairs.append((n, N))
        for key, value in report.deviations().items():
            devs[key].append(abs(value))
    return [make_report(pairs, f"identity_{key}", values, "bounded", 1e-10) for key, values in devs.items()]


def _cphi_reports() -> List[ConvergenceReport]:
    trend_schedule, trend = [], []
    for N in (10, 40, 160):
        alpha = N * N - N - 1
        trend_schedule.append((N + alpha, N))
        trend.append(abs(cphi_closed_form(N, alpha).sqrt2_cphi - 1.0))

    oracle_schedule, oracle = [], []
    for N in range(2, 21, 2):
        for alpha in range(2, 41):
            closed = laguerre_moment_closed_form(N, alpha)
            oracle_schedule.append((N + alpha, N))
            oracle.append(abs(laguerre_moment_quadrature(N, alpha) - closed) / closed)
    return [
        make_report(trend_schedule, "sqrt2_cphi_minus_one", trend, "decreasing", 0.01),
        make_report(oracle_schedule, "moment_quadrature_rel_error", oracle, "bounded", 1e-8),
    ]


def cmd_verify(suite: str, out: Optional[str] = None) -> List[ConvergenceReport]:
    """Run one verification suite; raises VerificationFailure after writing the report."""
    start = time.time()
    if suite == "identities":
        reports = _identity_reports()
    elif suite == "cphi":
        reports = _cphi_reports()
    elif suite == "convergence":
        reports = cv.phi_tau_convergence() + cv.phi_derivative_convergence()
    elif suite == "kernels":
        reports = cv.kernel_convergence()
    else:
        raise DomainError(f"suite must be one of {SUITES}, got {suite!r}")

    meta = {"suite": suite, "versions": _versions(), "duration_sec": round(time.time() - start, 3)}
    if out:
        save_json(out, meta, [r.to_dict() for r in reports])
    else:
        print(cv.reports_to_json(reports, meta))

    rows = [["Metric", "Last value", "Tolerance", "Verdict"]]
    for r in reports:
        rows.append([r.metric, f"{r.values[-1]:.3e}", f"{r.tolerance:g}", r.verdict])
    print(tabulate(rows, headers="firstrow", tablefmt="grid"), file=sys.stderr)

    failing = [r.metric for r in reports if not r.passed]
    if failing:
        raise VerificationFailure(f"suite {suite!r} failed: {', '.join(failing)}", failing)
    return reports


def cmd_sample_dump(dims: Tuple[int, int], reps: int, k: int, field: str, path: str,
                    seed: int, workers: int, out: str) -> str:
    n, p = dims
    runner = MonteCarloService(workers=workers)
    samples = runner.run(n, p, reps, k=k, field=field, seed=seed, path=path)
    return write_sample_dump(out, samples)


def cmd_read_dump(dump_path: str, variant: str = "adjusted") -> List[float]:
    """Summarize a dump: empirical CDF of standardized l_1 at the reference quantiles."""
    samples = read_sample_dump(dump_path)
    if not samples:
        raise InputFileError(f"sample dump {dump_path} holds no draws")
    first = samples[0]
    ecdf = empirical_cdf(samples, scaling(first.n, first.p, variant))
    values = [float(v) for v in ecdf.evaluate(np.asarray(TABLE_QUANTILES))]

    print("=" * 60)
    print(f"SAMPLE DUMP {dump_path}: {len(samples):,} draws of {first.n}x{first.p} ({first.field})")
    print("=" * 60)
    rows = [["Quantile", "Empirical CDF"]] + [[f"{q:.2f}", f"{v:.3f}"] for q, v in zip(TABLE_QUANTILES, values)]
    print(tabulate(rows, headers="firstrow", tablefmt="grid"))
    return values


# ----------------------- Entry point -----------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wishart_tw", description="Tracy-Widom / Wishart toolkit")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--quiet", action="store_true", help="warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="reproduce a quantile table by simulation")
    t.add_argument("--dims", type=parse_dims, help="comma-separated shapes, e.g. 5x200,10x1000")
    t.add_argument("--table", choices=sorted(REFERENCE_TABLES), help="use the shapes of a published table")
    t.add_argument("--reps", type=int, default=None)
    t.add_argument("--variant", choices=["original", "adjusted", "section4"], default="adjusted")
    t.add_argument("--field", choices=["real", "complex"], default="real")
    t.add_argument("--path", choices=["auto", "dense", "tridiagonal"], default="auto")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--workers", type=int, default=None)
    t.add_argument("--out", help="CSV output path (a JSON sidecar is written next to it)")
    t.add_argument("--progress", action="store_true", help="show progress bars")

    w = sub.add_parser("tw", help="Tracy-Widom CDF or quantile")
    w.add_argument("which", choices=["TW1", "TW2"])
    w.add_argument("mode", choices=["cdf", "quantile"])
    w.add_argument("value", type=float)

    pca = sub.add_parser("pca-test", help="largest-root test of the white null on a data matrix")
    pca.add_argument("input", help="CSV matrix, rows = observations")
    pca.add_argument("--variant", choices=["original", "adjusted", "section4"], default="adjusted")
    pca.add_argument("--out", help="JSON report path")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--out", help="JSON report path (stdout when omitted)")

    d = sub.add_parser("sample-dump", help="dump top-k eigenvalue draws to CSV, or summarize a dump")
    d.add_argument("--dims", type=parse_dims, default=[(20, 5)])
    d.add_argument("--reps", type=int, default=1000)
    d.add_argument("--k", type=int, default=1)
    d.add_argument("--field", choices=["real", "complex"], default="real")
    d.add_argument("--path", choices=["dense", "tridiagonal"], default="dense")
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--workers", type=int, default=None)
    d.add_argument("--variant", choices=["original", "adjusted", "section4"], default="adjusted")
    d.add_argument("--out", help="CSV output path")
    d.add_argument("--read", help="summarize an existing dump instead of sampling")
    return parser


def _dispatch(args, settings: Settings) -> None:
    if args.command == "table":
        dims = args.dims or (REFERENCE_TABLES[args.table] if args.table else [(5, 200)])
        config = ExperimentConfig(
            dims=dims,
            reps=args.reps or settings.reps,
            variant=args.variant,
            field=args.field,
            seed=settings.seed if args.seed is None else args.seed,
            workers=args.workers or settings.workers,
            path=args.path,
        )
        cmd_table(config, args.out, settings, show_progress=args.progress)
    elif args.command == "tw":
        cmd_tw(args.which, args.mode, args.value, settings)
    elif args.command == "pca-test":
        cmd_pca_test(args.input, args.variant, args.out, settings)
    elif args.command == "verify":
        cmd_verify(args.suite, args.out)
    elif args.command == "sample-dump":
        if args.read:
            cmd_read_dump(args.read, args.variant)
            return
        if not args.out:
            raise DomainError("sample-dump needs --out (or --read)")
        path = cmd_sample_dump(
            args.dims[0], args.reps, args.k, args.field, args.path,
            settings.seed if args.seed is None else args.seed,
            args.workers or settings.workers, args.out,
        )
        print(f"Samples saved to: {path}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    settings = Settings.from_env()
    try:
        _dispatch(args, settings)
    except VerificationFailure as e:
        logger.error("%s", e)
        return EXIT_VERIFY
    except DomainError as e:
        logger.error("Domain error: %s", e)
        return EXIT_DOMAIN
    except InputFileError as e:
        logger.error("Input error: %s", e)
        return EXIT_INPUT
    except NumericError as e:
        logger.error("Numerical failure: %s", e)
        return EXIT_NUMERIC
    except KeyboardInterrupt:
        print("\n\nProcess interrupted by user. Partial results may be available.")
        return 130
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
