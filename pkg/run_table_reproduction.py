#!/usr/bin/env python3
"""
Standalone script to reproduce both published quantile tables
"""

import sys
import os
import time

# Add repository root to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from wishart_tw.cli import cmd_table
from wishart_tw.service.table_service import REFERENCE_TABLES, ExperimentConfig
from wishart_tw.settings import Settings, configure_logging


def main():
    print("="*70)
    print("TRACY-WIDOM TABLE REPRODUCTION")
    print("Using: bidiagonal chi model + adjusted centering, TW1 reference")
    print("="*70)

    configure_logging(quiet=True)
    settings = Settings.from_env()

    reps = settings.reps
    # For a quick look, uncomment this:
    # reps = 1000

    overall_start = time.time()

    try:
        for name in ("table1", "table2"):
            config = ExperimentConfig(
                dims=REFERENCE_TABLES[name],
                reps=reps,
                variant="adjusted",
                field="real",
                seed=settings.seed,
                workers=settings.workers,
            )
            cmd_table(config, out=f"results/{name}.csv", settings=settings, show_progress=True)

        overall_time = time.time() - overall_start

        print("\n" + "="*70)
        print("TABLE REPRODUCTION COMPLETE")
        print("="*70)
        print(f"Total execution time: {overall_time/60:.1f} minutes")
        print(f"Draws per column: {reps:,}")
        print("Results saved to: results/table1.csv, results/table2.csv")
        print("="*70)

    except KeyboardInterrupt:
        print("\n\nProcess interrupted by user. Partial results may be available.")
    except Exception as e:
        print(f"\nERROR: {e}")
        import traceback
        traceback.print_exc()


if __name__ == '__main__':
    main()
