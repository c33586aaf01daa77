"""Hybrid vs upwind max-norm errors against N, with N^-1 and N^-2 references.

Writes CSV to stdout (or --csv PATH); --png PATH additionally draws the loglog
figure and needs matplotlib.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from turnpoint.analysis import DEFAULT_NS, run_convergence
from turnpoint.cli import parse_real, plot_rows, render
from turnpoint.problem import BUILTIN_PROBLEMS
from turnpoint.scheme import SCHEMES


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", choices=sorted(BUILTIN_PROBLEMS), default="example1")
    ap.add_argument("--eps", type=parse_real, default=1e-8)
    ap.add_argument("--csv")
    ap.add_argument("--png")
    args = ap.parse_args()

    problem = BUILTIN_PROBLEMS[args.problem]()
    errors = {s: run_convergence(problem, s, [args.eps], DEFAULT_NS).errors(args.eps) for s in SCHEMES}
    text = render(plot_rows(errors, DEFAULT_NS), "csv")
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        print(text, end="")

    if args.png:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        ns = list(DEFAULT_NS)
        fig, ax = plt.subplots(figsize=(5, 4))
        for s in SCHEMES:
            ax.loglog(ns, errors[s], "o-", label=s)
        ax.loglog(ns, [1 / n for n in ns], "k--", lw=0.8, label="1/N")
        ax.loglog(ns, [1 / n ** 2 for n in ns], "k:", lw=0.8, label="1/N^2")
        ax.set_xlabel("N")
        ax.set_ylabel("max nodal error")
        ax.set_title(f"{args.problem}, eps = {args.eps:g}")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.png, dpi=150)


if __name__ == "__main__":
    main()
