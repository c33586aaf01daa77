"""Direct solution of the assembled tridiagonal systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .mesh import ShishkinMesh
from .scheme import TridiagonalSystem

PIVOT_FLOOR = 1e-300


class SingularSystemError(ArithmeticError):
    def __init__(self, row: int, pivot: float):
        super().__init__(f"zero pivot {pivot!r} in row {row}")
        self.row = row
        self.pivot = pivot


@dataclass(frozen=True, eq=False)
class DiscreteSolution:
    values: np.ndarray
    mesh: ShishkinMesh
    epsilon: float
    scheme: str
    diagnostics: Optional[dict] = field(default=None)

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh.nodes


def thomas(sub, diag, sup, rhs) -> np.ndarray:
    """Thomas algorithm without pivoting. ``sub[0]`` and ``sup[-1]`` are ignored."""
    n = len(diag)
    c = np.empty(n)
    d = np.empty(n)
    piv = diag[0]
    if abs(piv) < PIVOT_FLOOR:
        raise SingularSystemError(0, float(piv))
    c[0] = sup[0] / piv
    d[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i] * c[i - 1]
        if abs(piv) < PIVOT_FLOOR:
            raise SingularSystemError(i, float(piv))
        c[i] = sup[i] / piv if i < n - 1 else 0.0
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def solve(system: TridiagonalSystem) -> DiscreteSolution:
    u = thomas(system.sub.tolist(), system.diag.tolist(), system.sup.tolist(), system.rhs.tolist())
    u[0], u[-1] = system.bc_left, system.bc_right
    return DiscreteSolution(u, system.mesh, system.epsilon, system.scheme)


def dense_solve(system: TridiagonalSystem) -> np.ndarray:
    """Dense LU with partial pivoting; the test oracle for :func:`solve`."""
    return np.linalg.solve(system.to_dense(), system.rhs)


def residual(system: TridiagonalSystem, solution) -> float:
    """Max interior-row residual ``|p_l U_{i-1} + p_c U_i + p_r U_{i+1} - rhs_i|``."""
    u = solution.values if isinstance(solution, DiscreteSolution) else np.asarray(solution, dtype=float)
    if len(u) != system.n + 1:
        raise ValueError("solution length does not match system")
    if system.n < 2:
        return 0.0
    return float(np.max(np.abs(system.apply(u) - system.rhs[1:-1])))


def residual_bound(system: TridiagonalSystem, solution) -> float:
    """Tolerance ``1e-11 * max row scale * ||U||`` the solve residual must meet."""
    u = solution.values if isinstance(solution, DiscreteSolution) else np.asarray(solution)
    return 1e-11 * float(np.max(system.row_scale())) * float(np.max(np.abs(u)))
