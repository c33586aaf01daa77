"""Finite-difference assembly on a Shishkin mesh.

Each interior row ``i`` has the form ``p_l*U[i-1] + p_c*U[i] + p_r*U[i+1] = rhs``.
The hybrid operator uses central differences inside the two fine layer
pieces and midpoint upwinding (by the sign of ``a_i``) on
``i = n/4 .. 3n/4``. Half-node values are arithmetic means of nodal values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .mesh import ShishkinMesh
from .problem import ProblemSpec, evaluate


class StencilKind(enum.Enum):
    CENTRAL = "central"
    MIDPOINT_FORWARD = "midpoint_forward"
    MIDPOINT_BACKWARD = "midpoint_backward"
    UPWIND_FORWARD = "upwind_forward"
    UPWIND_BACKWARD = "upwind_backward"


SCHEMES = ("hybrid", "upwind")


@dataclass(frozen=True)
class StencilRow:
    p_l: float
    p_c: float
    p_r: float
    rhs: float
    kind: StencilKind


@dataclass(frozen=True, eq=False)
class TridiagonalSystem:
    """Full (n+1)-row system; rows 0 and n are identity rows carrying the BCs."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    kinds: tuple
    bc_left: float
    bc_right: float
    mesh: ShishkinMesh
    epsilon: float
    scheme: str

    @property
    def n(self) -> int:
        return len(self.diag) - 1

    def row(self, i: int) -> StencilRow:
        return StencilRow(float(self.sub[i]), float(self.diag[i]), float(self.sup[i]),
                          float(self.rhs[i]), self.kinds[i - 1])

    def apply(self, v) -> np.ndarray:
        """Interior values ``(L v)_i`` for i = 1..n-1."""
        v = np.asarray(v, dtype=float)
        return self.sub[1:-1] * v[:-2] + self.diag[1:-1] * v[1:-1] + self.sup[1:-1] * v[2:]

    def row_scale(self) -> np.ndarray:
        return np.abs(self.sub[1:-1]) + np.abs(self.diag[1:-1]) + np.abs(self.sup[1:-1])

    def to_dense(self) -> np.ndarray:
        n = self.n
        m = np.diag(self.diag)
        m[np.arange(1, n + 1), np.arange(n)] = self.sub[1:]
        m[np.arange(n), np.arange(1, n + 1)] = self.sup[:-1]
        return m


def classify(i: int, n: int, a_i: float) -> StencilKind:
    """Stencil used by the hybrid scheme at interior node ``i``.

    ``a_i == 0`` inside the midpoint region is treated as forward. The
    assembler may still replace that row by a central one, see :func:`assemble`.
    """
    if not 1 <= i <= n - 1:
        raise IndexError(f"row {i} outside 1..{n - 1}")
    q = n // 4
    if i < q or i > 3 * q:
        return StencilKind.CENTRAL
    if a_i > 0:
        return StencilKind.MIDPOINT_FORWARD
    if a_i < 0:
        return StencilKind.MIDPOINT_BACKWARD
    return StencilKind.MIDPOINT_FORWARD


def _local(mesh: ShishkinMesh, i: int):
    x = mesh.nodes
    hi, hn = x[i] - x[i - 1], x[i + 1] - x[i]
    return hi, hn, 0.5 * (hi + hn)


def _values(problem: ProblemSpec, mesh: ShishkinMesh, i: int):
    pts = mesh.nodes[i - 1: i + 2]
    return evaluate(problem.a, pts), evaluate(problem.b, pts), evaluate(problem.f, pts)


def central_row(i: int, mesh: ShishkinMesh, problem: ProblemSpec, epsilon: float) -> StencilRow:
    hi, hn, hh = _local(mesh, i)
    a, b, f = _values(problem, mesh, i)
    p_l = epsilon / (hi * hh) - a[1] / (2 * hh)
    p_r = epsilon / (hn * hh) + a[1] / (2 * hh)
    return StencilRow(p_l, -p_l - p_r - b[1], p_r, float(f[1]), StencilKind.CENTRAL)


def midpoint_row(i: int, mesh: ShishkinMesh, problem: ProblemSpec, epsilon: float,
                 direction: str) -> StencilRow:
    """Midpoint upwind row; ``direction`` is ``"forward"`` (a_i > 0) or ``"backward"``."""
    hi, hn, hh = _local(mesh, i)
    a, b, f = _values(problem, mesh, i)
    if direction == "forward":
        p_l = epsilon / (hi * hh)
        p_r = epsilon / (hn * hh) + 0.5 * (a[1] + a[2]) / hn - b[2] / 2
        p_c = -p_l - p_r - 0.5 * (b[1] + b[2])
        return StencilRow(p_l, p_c, p_r, 0.5 * (f[1] + f[2]), StencilKind.MIDPOINT_FORWARD)
    if direction == "backward":
        p_l = epsilon / (hi * hh) - 0.5 * (a[0] + a[1]) / hi - b[0] / 2
        p_r = epsilon / (hn * hh)
        p_c = -p_l - p_r - 0.5 * (b[0] + b[1])
        return StencilRow(p_l, p_c, p_r, 0.5 * (f[0] + f[1]), StencilKind.MIDPOINT_BACKWARD)
    raise ValueError(f"unknown direction {direction!r}")


def upwind_row(i: int, mesh: ShishkinMesh, problem: ProblemSpec, epsilon: float) -> StencilRow:
    hi, hn, hh = _local(mesh, i)
    a, b, f = _values(problem, mesh, i)
    p_l = epsilon / (hi * hh)
    p_r = epsilon / (hn * hh)
    if a[1] > 0:
        p_r += a[1] / hn
        kind = StencilKind.UPWIND_FORWARD
    else:
        p_l -= a[1] / hi
        kind = StencilKind.UPWIND_BACKWARD
    return StencilRow(p_l, -p_l - p_r - b[1], p_r, float(f[1]), kind)


def _check_match(problem: ProblemSpec, mesh: ShishkinMesh, epsilon: float):
    lo, hi = mesh.domain
    if lo != problem.domain_left or hi != problem.domain_right:
        raise ValueError("mesh and problem domains differ")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")


def _empty(mesh, problem):
    n = mesh.n
    x = mesh.nodes
    h = np.diff(x)
    hi, hn = h[:-1], h[1:]
    hh = 0.5 * (hi + hn)
    a, b, f = (evaluate(g, x) for g in (problem.a, problem.b, problem.f))
    sub, diag, sup, rhs = (np.zeros(n + 1) for _ in range(4))
    diag[0] = diag[n] = 1.0
    rhs[0], rhs[n] = problem.bc_left, problem.bc_right
    return x, hi, hn, hh, a, b, f, sub, diag, sup, rhs


def assemble(problem: ProblemSpec, mesh: ShishkinMesh, epsilon: float) -> TridiagonalSystem:
    """Hybrid central / midpoint-upwind system.

    At a node where ``a`` vanishes the forward midpoint row is used unless its
    ``p_r`` would be nonpositive (small eps near a turning point); the central
    row, which reduces to ``eps*delta^2 U - b U = f`` there, replaces it.
    """
    _check_match(problem, mesh, epsilon)
    n = mesh.n
    x, hi, hn, hh, a, b, f, sub, diag, sup, rhs = _empty(mesh, problem)
    kinds = []
    for i in range(1, n):
        kind = classify(i, n, float(a[i]))
        if kind is StencilKind.MIDPOINT_FORWARD and a[i] == 0.0:
            h1 = hn[i - 1]
            p_r = epsilon / (h1 * hh[i - 1]) + 0.5 * (a[i] + a[i + 1]) / h1 - b[i + 1] / 2
            if not p_r > 0:
                kind = StencilKind.CENTRAL
        kinds.append(kind)
    kinds = tuple(kinds)
    k = np.array([kk.value for kk in kinds])
    c = k == StencilKind.CENTRAL.value
    fw = k == StencilKind.MIDPOINT_FORWARD.value
    bw = k == StencilKind.MIDPOINT_BACKWARD.value

    ai, bi, fi = a[1:-1], b[1:-1], f[1:-1]
    al, bl, fl = a[:-2], b[:-2], f[:-2]
    ar, br, fr = a[2:], b[2:], f[2:]
    diff_l = epsilon / (hi * hh)
    diff_r = epsilon / (hn * hh)

    pl = np.where(c, diff_l - ai / (2 * hh), 0.0)
    pr = np.where(c, diff_r + ai / (2 * hh), 0.0)
    react = np.where(c, bi, 0.0)
    src = np.where(c, fi, 0.0)

    pl = np.where(fw, diff_l, pl)
    pr = np.where(fw, diff_r + 0.5 * (ai + ar) / hn - br / 2, pr)
    react = np.where(fw, 0.5 * (bi + br), react)
    src = np.where(fw, 0.5 * (fi + fr), src)

    pl = np.where(bw, diff_l - 0.5 * (al + ai) / hi - bl / 2, pl)
    pr = np.where(bw, diff_r, pr)
    react = np.where(bw, 0.5 * (bl + bi), react)
    src = np.where(bw, 0.5 * (fl + fi), src)

    sub[1:-1], sup[1:-1] = pl, pr
    diag[1:-1] = -pl - pr - react
    rhs[1:-1] = src
    return TridiagonalSystem(sub, diag, sup, rhs, kinds, problem.bc_left, problem.bc_right,
                             mesh, epsilon, "hybrid")


def assemble_upwind(problem: ProblemSpec, mesh: ShishkinMesh, epsilon: float) -> TridiagonalSystem:
    """First-order upwind baseline (D+ where a_i > 0, D- otherwise) on the same mesh."""
    _check_match(problem, mesh, epsilon)
    n = mesh.n
    x, hi, hn, hh, a, b, f, sub, diag, sup, rhs = _empty(mesh, problem)
    ai = a[1:-1]
    fwd = ai > 0
    pl = epsilon / (hi * hh) - np.where(fwd, 0.0, ai / hi)
    pr = epsilon / (hn * hh) + np.where(fwd, ai / hn, 0.0)
    sub[1:-1], sup[1:-1] = pl, pr
    diag[1:-1] = -pl - pr - b[1:-1]
    rhs[1:-1] = f[1:-1]
    kinds = tuple(StencilKind.UPWIND_FORWARD if v else StencilKind.UPWIND_BACKWARD for v in fwd)
    return TridiagonalSystem(sub, diag, sup, rhs, kinds, problem.bc_left, problem.bc_right,
                             mesh, epsilon, "upwind")


def assemble_scheme(scheme: str, problem: ProblemSpec, mesh: ShishkinMesh,
                    epsilon: float) -> TridiagonalSystem:
    if scheme == "hybrid":
        return assemble(problem, mesh, epsilon)
    if scheme == "upwind":
        return assemble_upwind(problem, mesh, epsilon)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class AssumptionDiagnostics:
    # condition 1: h*||a||/(2 eps) < 1, decided on the mesh-independent form
    # 2*tau0*||a|| < n/ln(n)
    peclet_ratio: float
    tau0_lhs: float
    tau0_rhs: float
    condition1: bool
    # condition 2: 2*||b||/n <= alpha
    reaction_lhs: float
    alpha: float
    condition2: bool

    @property
    def passed(self) -> bool:
        return self.condition1 and self.condition2

    def as_dict(self) -> dict:
        return {
            "peclet_ratio": self.peclet_ratio,
            "tau0_lhs": self.tau0_lhs,
            "tau0_rhs": self.tau0_rhs,
            "condition1": self.condition1,
            "reaction_lhs": self.reaction_lhs,
            "alpha": self.alpha,
            "condition2": self.condition2,
        }


def check_assumptions(problem: ProblemSpec, mesh: ShishkinMesh, epsilon: float) -> AssumptionDiagnostics:
    """Evaluate the mesh conditions under which the hybrid operator is of negative type."""
    na, nb, _ = problem.sup_norms(extra=mesh.nodes)
    n = mesh.n
    tau0 = mesh.config.tau0
    lhs1 = 2.0 * tau0 * na
    rhs1 = n / math.log(n)
    lhs2 = 2.0 * nb / n
    return AssumptionDiagnostics(
        peclet_ratio=mesh.fine_width * na / (2.0 * epsilon),
        tau0_lhs=lhs1, tau0_rhs=rhs1, condition1=lhs1 < rhs1,
        reaction_lhs=lhs2, alpha=float(problem.alpha), condition2=lhs2 <= problem.alpha,
    )
