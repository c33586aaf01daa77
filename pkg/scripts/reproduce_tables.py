"""Print the hybrid-scheme error/order tables for both model problems.

Usage: python scripts/reproduce_tables.py [--format markdown|csv] [--tau0 0.8]
"""

from __future__ import annotations

import argparse
import time

from turnpoint.analysis import DEFAULT_EPSILONS, DEFAULT_EPSILONS_POW2, DEFAULT_NS, run_convergence
from turnpoint.cli import render, table_rows
from turnpoint.mesh import DEFAULT_TAU0
from turnpoint.problem import example1, example2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    ap.add_argument("--tau0", type=float, default=DEFAULT_TAU0)
    args = ap.parse_args()

    for make in (example1, example2):
        for label, eps in (("powers of ten", DEFAULT_EPSILONS), ("powers of two", DEFAULT_EPSILONS_POW2)):
            t0 = time.perf_counter()
            report = run_convergence(make(), "hybrid", eps, DEFAULT_NS, args.tau0)
            dt = time.perf_counter() - t0
            print(f"## {make.__name__}, eps = {label}, tau0 = {args.tau0:g} ({dt:.2f}s)\n")
            print(render(table_rows(report), args.format))


if __name__ == "__main__":
    main()
