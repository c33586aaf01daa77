"""Nodal error measures, observed orders and (eps, N) convergence studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .mesh import DEFAULT_TAU0, MeshConfig, ShishkinMesh, build_mesh
from .problem import ProblemSpec
from .scheme import assemble_scheme, check_assumptions
from .solver import DiscreteSolution, residual, residual_bound, solve

DEFAULT_EPSILONS = tuple(10.0 ** -k for k in range(10))
DEFAULT_EPSILONS_POW2 = (2.0 ** -12, 2.0 ** -16)
DEFAULT_NS = (16, 32, 64, 128, 256, 512, 1024)


class NonNestedMeshError(ValueError):
    pass


class ResidualError(ArithmeticError):
    pass


class CellFailure(RuntimeError):
    """A single (eps, n) cell of a study failed; wraps the numerical cause."""

    def __init__(self, epsilon: float, n: int, cause: Exception):
        super().__init__(f"eps={epsilon:g}, n={n}: {cause}")
        self.epsilon = epsilon
        self.n = n
        self.cause = cause


@dataclass(frozen=True)
class ErrorGridEntry:
    epsilon: float
    n: int
    error: float
    tau0: float
    scheme: str
    order: Optional[float] = None
    assumptions: Optional[dict] = None


@dataclass(frozen=True)
class ReportMetadata:
    problem: str
    tau0: float
    scheme: str
    error_mode: str


@dataclass
class ConvergenceReport:
    entries: list[ErrorGridEntry]
    uniform_rows: dict[int, float]
    metadata: ReportMetadata
    epsilons: list[float] = field(default_factory=list)
    ns: list[int] = field(default_factory=list)

    def entry(self, epsilon: float, n: int) -> ErrorGridEntry:
        for e in self.entries:
            if e.epsilon == epsilon and e.n == n:
                return e
        raise KeyError((epsilon, n))

    def errors(self, epsilon: float) -> list[float]:
        return [self.entry(epsilon, n).error for n in self.ns]

    def orders(self, epsilon: float) -> list[Optional[float]]:
        return [self.entry(epsilon, n).order for n in self.ns]

    def uniform_orders(self) -> list[Optional[float]]:
        out = []
        for k, n in enumerate(self.ns):
            nxt = self.ns[k + 1] if k + 1 < len(self.ns) else None
            out.append(observed_order(self.uniform_rows[n], self.uniform_rows[nxt])
                       if nxt == 2 * n and self.uniform_rows[nxt] > 0 and self.uniform_rows[n] > 0 else None)
        return out


def max_pointwise_error(solution: DiscreteSolution, exact: Callable) -> float:
    """``max_i |u(x_i) - U_i|`` over all mesh nodes."""
    u = np.asarray(exact(solution.nodes, solution.epsilon), dtype=float)
    return float(np.max(np.abs(u - solution.values)))


def double_mesh_error(coarse: DiscreteSolution, fine: DiscreteSolution, tol: float = 1e-12) -> float:
    """``max_i |U^n_i - U^{2n}_{2i}|``; the fine mesh must contain every coarse node."""
    if len(fine.values) != 2 * (len(coarse.values) - 1) + 1:
        raise NonNestedMeshError("fine mesh must have exactly twice the intervals")
    gap = float(np.max(np.abs(fine.nodes[::2] - coarse.nodes)))
    if gap > tol:
        raise NonNestedMeshError(f"coarse nodes missing from fine mesh (gap {gap:.3e})")
    return float(np.max(np.abs(coarse.values - fine.values[::2])))


def observed_order(e_n: float, e_2n: float) -> float:
    if not (e_n > 0 and e_2n > 0):
        raise ValueError("errors must be positive to estimate an order")
    return math.log2(e_n / e_2n)


def solve_problem(problem: ProblemSpec, epsilon: float, n: int, tau0: float = DEFAULT_TAU0,
                  scheme: str = "hybrid", tau: Optional[float] = None,
                  tau_cap: Optional[float] = None, residual_check: bool = False) -> DiscreteSolution:
    """Mesh, assemble and solve one (eps, n) cell; assumption diagnostics are attached."""
    mesh = build_mesh(MeshConfig(n=n, epsilon=epsilon, tau0=tau0, tau=tau, tau_cap=tau_cap,
                                 domain_left=problem.domain_left, domain_right=problem.domain_right))
    system = assemble_scheme(scheme, problem, mesh, epsilon)
    sol = solve(system)
    if not np.all(np.isfinite(sol.values)):
        raise ArithmeticError("non-finite discrete solution")
    if residual_check:
        r, bound = residual(system, sol), residual_bound(system, sol)
        if not r <= bound:
            raise ResidualError(f"residual {r:.3e} exceeds {bound:.3e}")
    diag = check_assumptions(problem, mesh, epsilon).as_dict()
    return DiscreteSolution(sol.values, mesh, epsilon, scheme, diag)


def cell_error(problem: ProblemSpec, epsilon: float, n: int, tau0: float, scheme: str,
               mode: str, tau_cap: Optional[float] = None,
               residual_check: bool = False) -> tuple[float, dict]:
    try:
        sol = solve_problem(problem, epsilon, n, tau0, scheme, tau_cap=tau_cap,
                            residual_check=residual_check)
        if mode == "exact":
            return max_pointwise_error(sol, problem.exact), sol.diagnostics
        fine = solve_problem(problem, epsilon, 2 * n, tau0, scheme, tau=sol.mesh.tau,
                             tau_cap=tau_cap, residual_check=residual_check)
        return double_mesh_error(sol, fine), sol.diagnostics
    except ArithmeticError as exc:
        raise CellFailure(epsilon, n, exc) from exc


def run_convergence(problem: ProblemSpec, scheme: str = "hybrid",
                    epsilons: Sequence[float] = DEFAULT_EPSILONS,
                    ns: Sequence[int] = DEFAULT_NS, tau0: float = DEFAULT_TAU0,
                    error_mode: Optional[str] = None,
                    tau_cap: Optional[float] = None,
                    residual_check: bool = False) -> ConvergenceReport:
    """Error and order table over every (eps, n) pair.

    ``error_mode`` is ``"exact"`` when the problem has an exact solution and
    ``"double-mesh"`` otherwise, unless given explicitly. Orders are filled
    between consecutive ``n`` that differ by a factor of two.
    """
    ns = [int(n) for n in ns]
    epsilons = [float(e) for e in epsilons]
    if not ns or not epsilons:
        raise ValueError("need at least one epsilon and one n")
    if ns != sorted(set(ns)):
        raise ValueError("ns must be strictly increasing")
    mode = error_mode or ("exact" if problem.exact is not None else "double-mesh")
    if mode not in ("exact", "double-mesh"):
        raise ValueError(f"unknown error mode {mode!r}")
    if mode == "exact" and problem.exact is None:
        raise ValueError("exact error mode requires an exact solution")

    errs: dict[tuple[float, int], tuple[float, dict]] = {}
    for eps in epsilons:
        for n in ns:
            errs[eps, n] = cell_error(problem, eps, n, tau0, scheme, mode, tau_cap, residual_check)

    entries = []
    for eps in epsilons:
        for k, n in enumerate(ns):
            e, diag = errs[eps, n]
            order = None
            if k + 1 < len(ns) and ns[k + 1] == 2 * n:
                e2 = errs[eps, ns[k + 1]][0]
                if e > 0 and e2 > 0:
                    order = observed_order(e, e2)
            entries.append(ErrorGridEntry(eps, n, e, tau0, scheme, order, diag))
    uniform = {n: max(errs[eps, n][0] for eps in epsilons) for n in ns}
    meta = ReportMetadata(problem.name, tau0, scheme, mode)
    return ConvergenceReport(entries, uniform, meta, epsilons, ns)
