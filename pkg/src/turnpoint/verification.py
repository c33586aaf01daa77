"""Numerical checks of the discrete operator's structural properties.

Each check sweeps an (eps, n) grid and returns a :class:`CheckResult` carrying
the worst margin seen (positive = satisfied with room to spare).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .mesh import DEFAULT_TAU0, MeshConfig, build_mesh
from .problem import ProblemSpec, evaluate
from .scheme import assemble, check_assumptions
from .solver import dense_solve, solve

CHECK_EPSILONS = tuple(10.0 ** -k for k in range(2, 9))
CHECK_NS = (16, 32, 64, 128, 256)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_margin: float
    worst_case: Optional[tuple] = None
    cells: int = 0
    skipped: int = 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = "" if self.worst_case is None else f" at {self.worst_case}"
        extra = f", {self.skipped} skipped" if self.skipped else ""
        return f"{status}  {self.name}: worst margin {self.worst_margin:.3e}{where} ({self.cells} cells{extra})"


class _Worst:
    def __init__(self):
        self.margin = np.inf
        self.case = None
        self.cells = 0
        self.skipped = 0

    def update(self, margin: float, case):
        if margin < self.margin:
            self.margin, self.case = float(margin), case

    def result(self, name: str) -> CheckResult:
        return CheckResult(name, bool(self.margin >= 0), self.margin, self.case, self.cells, self.skipped)


def _system(problem, eps, n, tau0):
    mesh = build_mesh(MeshConfig(n=n, epsilon=eps, tau0=tau0, domain_left=problem.domain_left,
                                 domain_right=problem.domain_right))
    return mesh, assemble(problem, mesh, eps)


def _with_rhs(system, rhs, bc_left, bc_right):
    r = np.array(rhs, dtype=float)
    r[0], r[-1] = bc_left, bc_right
    return replace(system, rhs=r, bc_left=bc_left, bc_right=bc_right)


def check_m_matrix(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=CHECK_NS,
                   tau0: float = DEFAULT_TAU0) -> CheckResult:
    """``p_l > 0``, ``p_r > 0``, ``p_l + p_c + p_r < 0`` wherever the mesh conditions hold."""
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            mesh, s = _system(problem, eps, n, tau0)
            if not check_assumptions(problem, mesh, eps).passed:
                w.skipped += 1
                continue
            w.cells += 1
            scale = s.row_scale()
            pl, pr = s.sub[1:-1] / scale, s.sup[1:-1] / scale
            rs = -(s.sub[1:-1] + s.diag[1:-1] + s.sup[1:-1]) / scale
            m = np.minimum(np.minimum(pl, pr), rs)
            i = int(np.argmin(m))
            w.update(m[i], (eps, n, i + 1))
    return w.result("M-matrix sign pattern")


def check_minimum_principle(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=CHECK_NS,
                            tau0: float = DEFAULT_TAU0, trials: int = 100, seed: int = 0) -> CheckResult:
    """Random ``rhs <= 0`` with nonnegative boundary values must give ``U >= -1e-12*scale``."""
    rng = np.random.default_rng(seed)
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            mesh, s = _system(problem, eps, n, tau0)
            if not check_assumptions(problem, mesh, eps).passed:
                w.skipped += 1
                continue
            w.cells += 1
            for _ in range(trials):
                rhs = -rng.random(n + 1) * 10.0 ** rng.uniform(-3, 3)
                bl, br = rng.random(2)
                u = solve(_with_rhs(s, rhs, bl, br)).values
                scale = max(float(np.max(np.abs(u))), 1e-300)
                w.update((np.min(u) + 1e-12 * scale) / scale, (eps, n))
    return w.result("discrete minimum principle")


def check_stability(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=CHECK_NS,
                    tau0: float = DEFAULT_TAU0, trials: int = 20, seed: int = 1) -> CheckResult:
    """Zero boundary values: ``||U|| <= max|rhs| / beta + 1e-10*scale``."""
    rng = np.random.default_rng(seed)
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            mesh, s = _system(problem, eps, n, tau0)
            if not check_assumptions(problem, mesh, eps).passed:
                w.skipped += 1
                continue
            w.cells += 1
            for _ in range(trials):
                rhs = rng.uniform(-1, 1, n + 1)
                u = solve(_with_rhs(s, rhs, 0.0, 0.0)).values
                bound = np.max(np.abs(rhs[1:-1])) / problem.beta
                w.update((bound + 1e-10 * bound - np.max(np.abs(u))) / bound, (eps, n))
    return w.result("discrete stability 1/beta")


def check_solution_bound(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=CHECK_NS,
                         tau0: float = DEFAULT_TAU0) -> CheckResult:
    """Discrete solutions obey ``||U|| <= ||f||/beta + max(|A|, |B|) + 1e-8``."""
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            mesh, s = _system(problem, eps, n, tau0)
            if not check_assumptions(problem, mesh, eps).passed:
                w.skipped += 1
                continue
            w.cells += 1
            u = solve(s).values
            _, _, nf = problem.sup_norms(extra=mesh.nodes)
            bound = nf / problem.beta + max(abs(problem.bc_left), abs(problem.bc_right))
            w.update(bound + 1e-8 - np.max(np.abs(u)), (eps, n))
    return w.result("solution bound ||f||/beta + max|BC|")


def barrier_functions(mesh, epsilon: float, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Left and right layer barriers, products of ``(1 + gamma*h_j/eps)^-1``.

    Both are returned on all nodes; only ``i <= n/2`` (left) and ``i >= n/2``
    (right) are meaningful.
    """
    logs = np.log1p(gamma * mesh.widths / epsilon)
    left = np.exp(-np.concatenate([[0.0], np.cumsum(logs)]))
    right = np.exp(-np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]]))
    return left, right


def barrier_residuals(problem: ProblemSpec, epsilon: float, n: int, tau0: float = DEFAULT_TAU0,
                      gamma: Optional[float] = None):
    """``(L Phi^L)_i / rowscale_i`` for i = 1..n/2 and ``(L Phi^R)_i / rowscale_i`` for i = n/2..n-1."""
    gamma = problem.alpha / 4 if gamma is None else gamma
    mesh, s = _system(problem, epsilon, n, tau0)
    left, right = barrier_functions(mesh, epsilon, gamma)
    scale = s.row_scale()
    h = n // 2
    rl = (s.apply(left) / scale)[:h]
    rr = (s.apply(right) / scale)[h - 1:]
    return rl, rr


def check_barrier(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=CHECK_NS,
                  tau0: float = DEFAULT_TAU0, gamma: Optional[float] = None,
                  layer_only: bool = False) -> CheckResult:
    """``L Phi^L <= 1e-12*rowscale`` on rows 1..n/2, mirrored for ``Phi^R``.

    With ``layer_only`` the rows are restricted to the fine pieces
    (1..n/4 and 3n/4..n-1).
    """
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            w.cells += 1
            rl, rr = barrier_residuals(problem, eps, n, tau0, gamma)
            if layer_only:
                rl, rr = rl[: n // 4], rr[n // 4:]
                off_r = 3 * n // 4
            else:
                off_r = n // 2
            il, ir = int(np.argmax(rl)), int(np.argmax(rr))
            w.update(1e-12 - rl[il], (eps, n, "left", il + 1))
            w.update(1e-12 - rr[ir], (eps, n, "right", off_r + ir))
    name = "barrier inequality (fine pieces)" if layer_only else "barrier inequality (rows 1..n/2, n/2..n-1)"
    return w.result(name)


def check_solver_oracle(problem: ProblemSpec, epsilons=CHECK_EPSILONS, ns=(16, 32, 64),
                        tau0: float = DEFAULT_TAU0) -> CheckResult:
    """Thomas solution against dense pivoted elimination, relative 1e-11."""
    w = _Worst()
    for eps in epsilons:
        for n in ns:
            w.cells += 1
            _, s = _system(problem, eps, n, tau0)
            u = solve(s).values
            ref = dense_solve(s)
            rel = np.max(np.abs(u - ref)) / max(np.max(np.abs(ref)), 1e-300)
            w.update(1e-11 - rel, (eps, n))
    return w.result("Thomas vs dense elimination")


def run_all(problem: ProblemSpec, epsilons: Sequence[float] = CHECK_EPSILONS,
            ns: Sequence[int] = CHECK_NS, tau0: float = DEFAULT_TAU0) -> list[CheckResult]:
    small = tuple(n for n in ns if n <= 64) or (16,)
    return [
        check_m_matrix(problem, epsilons, ns, tau0),
        check_minimum_principle(problem, epsilons, ns, tau0),
        check_stability(problem, epsilons, ns, tau0),
        check_solution_bound(problem, epsilons, ns, tau0),
        check_barrier(problem, epsilons, ns, tau0),
        check_barrier(problem, epsilons, ns, tau0, layer_only=True),
        check_solver_oracle(problem, epsilons, small, tau0),
    ]
