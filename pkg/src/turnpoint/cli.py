"""Command-line harness: convergence tables, loglog plot data and property checks.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .analysis import (DEFAULT_EPSILONS, DEFAULT_NS, CellFailure, ConvergenceReport,
                       run_convergence)
from .mesh import DEFAULT_TAU0, MeshConfig, build_mesh
from .problem import BUILTIN_PROBLEMS, ProblemSpec, polynomial_problem, validate
from .scheme import SCHEMES, check_assumptions
from . import verification

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str = "example1"
    schemes: tuple = ("hybrid",)
    epsilons: tuple = DEFAULT_EPSILONS
    ns: tuple = DEFAULT_NS
    tau0: float = DEFAULT_TAU0
    error_mode: Optional[str] = None
    fmt: str = "csv"
    output: Optional[str] = None
    plot_data: Optional[str] = None
    check_assumptions: bool = False
    residual_check: bool = False
    strict: bool = False
    custom: Optional[ProblemSpec] = field(default=None, repr=False)

    def validate(self):
        if not self.ns:
            raise ConfigError("need at least one n")
        for n in self.ns:
            if n % 4:
                raise ConfigError(f"n must be divisible by 4 (got {n})")
            if n < 8:
                raise ConfigError(f"n must be at least 8 (got {n})")
        if list(self.ns) != sorted(set(self.ns)):
            raise ConfigError("n values must be strictly increasing")
        if not self.epsilons:
            raise ConfigError("need at least one epsilon")
        for e in self.epsilons:
            if not 0 < e <= 1:
                raise ConfigError(f"epsilon must lie in (0, 1] (got {e})")
        if not self.tau0 > 0:
            raise ConfigError("tau0 must be positive")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}")
        if self.fmt not in ("csv", "markdown"):
            raise ConfigError(f"unknown format {self.fmt!r}")
        if self.error_mode not in (None, "exact", "double-mesh"):
            raise ConfigError(f"unknown error mode {self.error_mode!r}")
        return self

    def build_problem(self) -> ProblemSpec:
        if self.custom is not None:
            return self.custom
        try:
            return BUILTIN_PROBLEMS[self.problem]()
        except KeyError:
            raise ConfigError(f"unknown problem {self.problem!r}") from None


# --- parsing -----------------------------------------------------------------

def parse_real(text: str) -> float:
    """Accept ``1e-8``, ``2^-16`` and ``10^-3``."""
    t = text.strip()
    try:
        if "^" in t:
            base, exp = t.split("^", 1)
            return float(base) ** float(exp)
        return float(t)
    except ValueError:
        raise ConfigError(f"cannot parse number {text!r}") from None


def parse_reals(text: str) -> tuple:
    return tuple(parse_real(p) for p in text.split(",") if p.strip())


def parse_ints(text: str) -> tuple:
    out = []
    for p in text.split(","):
        if p.strip():
            try:
                out.append(int(p))
            except ValueError:
                raise ConfigError(f"cannot parse integer {p!r}") from None
    return tuple(out)


def parse_schemes(text: str) -> tuple:
    return SCHEMES if text.strip() == "both" else tuple(s.strip() for s in text.split(",") if s.strip())


def load_config(path: str) -> RunConfig:
    """Read an INI file with ``[problem]``, ``[grid]`` and ``[output]`` sections."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path}")
    cfg = RunConfig()
    if cp.has_section("problem"):
        sec = cp["problem"]
        pid = sec.get("id", "example1")
        if pid in BUILTIN_PROBLEMS:
            cfg.problem = pid
        else:
            for key in ("a", "b", "f"):
                if key not in sec:
                    raise ConfigError(f"[problem] needs key {key!r} for a custom problem")
            domain = parse_reals(sec.get("domain", "0, 1"))
            bc = parse_reals(sec.get("bc", "0, 0"))
            if len(domain) != 2 or len(bc) != 2:
                raise ConfigError("[problem] domain and bc take two values each")
            try:
                cfg.custom = polynomial_problem(
                    parse_reals(sec["a"]), parse_reals(sec["b"]), parse_reals(sec["f"]),
                    domain=domain, bc=bc,
                    alpha=parse_real(sec["alpha"]) if "alpha" in sec else None,
                    beta=parse_real(sec["beta"]) if "beta" in sec else None, name=pid)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            cfg.problem = pid
    if cp.has_section("grid"):
        sec = cp["grid"]
        if "scheme" in sec:
            cfg.schemes = parse_schemes(sec["scheme"])
        if "eps" in sec:
            cfg.epsilons = parse_reals(sec["eps"])
        if "n" in sec:
            cfg.ns = parse_ints(sec["n"])
        if "tau0" in sec:
            cfg.tau0 = parse_real(sec["tau0"])
        if "error_mode" in sec and sec["error_mode"] != "auto":
            cfg.error_mode = sec["error_mode"]
    if cp.has_section("output"):
        sec = cp["output"]
        cfg.fmt = sec.get("format", cfg.fmt)
        cfg.output = sec.get("path", cfg.output)
        cfg.plot_data = sec.get("plot_data", cfg.plot_data)
        cfg.check_assumptions = sec.getboolean("check_assumptions", cfg.check_assumptions)
        cfg.residual_check = sec.getboolean("residual_check", cfg.residual_check)
    return cfg


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.problem is not None:
        if args.problem not in BUILTIN_PROBLEMS:
            raise ConfigError(f"unknown problem {args.problem!r}")
        cfg = replace(cfg, problem=args.problem, custom=None)
    if args.scheme is not None:
        cfg.schemes = parse_schemes(args.scheme)
    if args.eps is not None:
        cfg.epsilons = parse_reals(args.eps)
    if args.n is not None:
        cfg.ns = parse_ints(args.n)
    if args.tau0 is not None:
        cfg.tau0 = args.tau0
    for key in ("error_mode", "format", "output", "emit_plot_data"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, {"format": "fmt", "emit_plot_data": "plot_data"}.get(key, key), val)
    cfg.check_assumptions = cfg.check_assumptions or getattr(args, "check_assumptions", False)
    cfg.residual_check = cfg.residual_check or getattr(args, "residual_check", False)
    cfg.strict = getattr(args, "strict", False)
    return cfg.validate()


# --- formatting ----------------------------------------------------------------

def fmt_error(v: float) -> str:
    """Five significant digits, ``2.6900E-2`` style."""
    if v == 0:
        return "0.0000E0"
    mant, exp = f"{v:.4E}".split("E")
    return f"{mant}E{int(exp)}"


def fmt_order(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.4f}"


def fmt_eps(e: float) -> str:
    for base in (10, 2):
        k = round(math.log(e, base))
        if base ** k == e:
            return f"{base}^{k}"
    return repr(e)


def table_rows(report: ConvergenceReport) -> list[list[str]]:
    header = ["epsilon"] + [f"N={n}" for n in report.ns]
    rows = [header]
    for e in report.epsilons:
        rows.append([fmt_eps(e)] + [fmt_error(v) for v in report.errors(e)])
        rows.append(["order"] + [fmt_order(v) for v in report.orders(e)])
    rows.append(["uniform"] + [fmt_error(report.uniform_rows[n]) for n in report.ns])
    return rows


def render(rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(rows[0]) + " |", "|" + "---|" * len(rows[0])]
    lines += ["| " + " | ".join(r) + " |" for r in rows[1:]]
    return "\n".join(lines) + "\n"


def plot_rows(errors: dict[str, list[float]], ns) -> list[list[str]]:
    header = ["n"] + [f"error_{s}" for s in SCHEMES if s in errors] + ["ref_inv_n", "ref_inv_n2"]
    rows = [header]
    for k, n in enumerate(ns):
        vals = [f"{errors[s][k]:.6e}" for s in SCHEMES if s in errors]
        rows.append([str(n)] + vals + [f"{1.0 / n:.6e}", f"{1.0 / n ** 2:.6e}"])
    return rows


def _emit(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------------

def _report(cfg: RunConfig, problem: ProblemSpec, scheme: str, epsilons=None) -> ConvergenceReport:
    return run_convergence(problem, scheme, epsilons or cfg.epsilons, cfg.ns, cfg.tau0,
                           cfg.error_mode, residual_check=cfg.residual_check)


def _flag_assumptions(report: ConvergenceReport) -> int:
    bad = 0
    for e in report.entries:
        d = e.assumptions or {}
        if not (d.get("condition1", True) and d.get("condition2", True)):
            bad += 1
            print(f"assumption check failed at eps={e.epsilon:g}, n={e.n}: "
                  f"condition1 {d['tau0_lhs']:.4g} < {d['tau0_rhs']:.4g} is {d['condition1']}, "
                  f"condition2 {d['reaction_lhs']:.4g} <= {d['alpha']:.4g} is {d['condition2']}",
                  file=sys.stderr)
    return bad


def cmd_table(cfg: RunConfig) -> int:
    problem = cfg.build_problem()
    out = []
    for scheme in cfg.schemes:
        report = _report(cfg, problem, scheme)
        if cfg.check_assumptions and _flag_assumptions(report) and cfg.strict:
            return EXIT_VERIFY
        if len(cfg.schemes) > 1:
            out.append(f"# scheme={scheme} problem={problem.name} tau0={cfg.tau0:g} "
                       f"errors={report.metadata.error_mode}\n")
        out.append(render(table_rows(report), cfg.fmt))
    _emit("".join(out), cfg.output)
    if cfg.plot_data:
        if len(cfg.ns) < 2:
            raise ConfigError("need at least two N values")
        Path(cfg.plot_data).write_text(render(_plot(cfg, problem, cfg.epsilons[0]), "csv"))
    return EXIT_OK


def _plot(cfg: RunConfig, problem: ProblemSpec, eps: float) -> list[list[str]]:
    errors = {s: _report(cfg, problem, s, [eps]).errors(eps) for s in cfg.schemes}
    return plot_rows(errors, cfg.ns)


def cmd_plot_data(cfg: RunConfig) -> int:
    if len(cfg.epsilons) != 1:
        raise ConfigError("plot-data takes exactly one epsilon")
    if len(cfg.ns) < 2:
        raise ConfigError("need at least two N values")
    problem = cfg.build_problem()
    _emit(render(_plot(cfg, problem, cfg.epsilons[0]), "csv"), cfg.output)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    problem = cfg.build_problem()
    ok = True
    for v in validate(problem):
        print(f"FAIL  admissibility: {v.condition} at x={v.x}: {v.detail}")
        ok = False
    flagged = 0
    for eps in cfg.epsilons:
        for n in cfg.ns:
            mesh = build_mesh(MeshConfig(n=n, epsilon=eps, tau0=cfg.tau0,
                                         domain_left=problem.domain_left,
                                         domain_right=problem.domain_right))
            d = check_assumptions(problem, mesh, eps)
            if not d.passed:
                flagged += 1
                which = [name for name, good in (("condition 1", d.condition1),
                                                 ("condition 2", d.condition2)) if not good]
                print(f"FLAG  assumptions at eps={eps:g}, n={n}: {', '.join(which)} fails "
                      f"(2*tau0*||a||={d.tau0_lhs:.4g} vs n/ln n={d.tau0_rhs:.4g}; "
                      f"2||b||/n={d.reaction_lhs:.4g} vs alpha={d.alpha:.4g})")
    if flagged and cfg.strict:
        ok = False
    for r in verification.run_all(problem, cfg.epsilons, cfg.ns, cfg.tau0):
        print(r.line())
        ok = ok and r.passed
    print("verify: all checks passed" if ok else "verify: FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


# --- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="turnpoint", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, eps_default_help):
        sp.add_argument("--config", help="INI file with [problem], [grid], [output] sections")
        sp.add_argument("--problem", help="example1 | example2")
        sp.add_argument("--scheme", help="hybrid | upwind | both (comma list accepted)")
        sp.add_argument("--eps", help=f"comma list, e.g. 1e-8,2^-16 ({eps_default_help})")
        sp.add_argument("--n", help="comma list of interval counts, each divisible by 4")
        sp.add_argument("--tau0", type=float, help=f"transition multiplier (default {DEFAULT_TAU0})")
        sp.add_argument("--output", "-o", help="output file (default stdout)")

    t = sub.add_parser("table", help="error / order table")
    common(t, "default 1 .. 1e-9")
    t.add_argument("--format", choices=("csv", "markdown"))
    t.add_argument("--error-mode", choices=("exact", "double-mesh"))
    t.add_argument("--emit-plot-data", metavar="PATH", help="also write plot data for the first eps")
    t.add_argument("--check-assumptions", action="store_true")
    t.add_argument("--residual-check", action="store_true")
    t.add_argument("--strict", action="store_true", help="failed assumptions are fatal")

    pd = sub.add_parser("plot-data", help="loglog plot data for one eps")
    common(pd, "exactly one")
    pd.add_argument("--error-mode", choices=("exact", "double-mesh"))
    pd.add_argument("--residual-check", action="store_true")

    v = sub.add_parser("verify", help="run the property checks")
    common(v, "default 1e-2 .. 1e-8")
    v.add_argument("--strict", action="store_true", help="failed assumptions are fatal")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify" and args.eps is None and args.n is None and not args.config:
            args.eps = ",".join(repr(e) for e in verification.CHECK_EPSILONS)
            args.n = ",".join(str(n) for n in verification.CHECK_NS)
        cfg = config_from_args(args)
        if args.command == "plot-data" and args.scheme is None and not args.config:
            cfg.schemes = SCHEMES
        if args.command == "table":
            return cmd_table(cfg)
        if args.command == "plot-data":
            return cmd_plot_data(cfg)
        return cmd_verify(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CellFailure as exc:
        print(f"numerical failure at eps={exc.epsilon:g}, n={exc.n}: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
