import numpy as np
import pytest

from turnpoint.mesh import MeshConfig, build_mesh
from turnpoint.verification import (CheckResult, barrier_functions, barrier_residuals, check_barrier,
                                    check_m_matrix, check_minimum_principle, check_solution_bound,
                                    check_solver_oracle, check_stability, run_all)

SMALL_EPS = (1e-2, 1e-5, 1e-8)
SMALL_NS = (16, 64)


def test_check_result_line():
    r = CheckResult("thing", False, -1.5e-3, (1e-2, 16), cells=4, skipped=1)
    assert r.line() == "FAIL  thing: worst margin -1.500e-03 at (0.01, 16) (4 cells, 1 skipped)"


@pytest.mark.parametrize("check", [check_m_matrix, check_minimum_principle, check_stability,
                                   check_solution_bound, check_solver_oracle])
def test_structural_checks_pass(builtin, check):
    r = check(builtin, SMALL_EPS, SMALL_NS)
    assert r.passed, r.line()
    assert r.cells + r.skipped == len(SMALL_EPS) * len(SMALL_NS)


def test_m_matrix_skips_cells_outside_mesh_conditions(ex1):
    r = check_m_matrix(ex1, (1e-8,), (16, 1024), tau0=2.5)
    assert r.skipped == 1 and r.cells == 1


def test_barrier_functions_shape():
    m = build_mesh(MeshConfig(n=32, epsilon=1e-3))
    left, right = barrier_functions(m, 1e-3, 0.5)
    assert left[0] == 1.0 and right[-1] == 1.0
    assert np.all(np.diff(left) < 0) and np.all(np.diff(right) > 0)
    k = 5
    assert left[k] == pytest.approx(np.prod(1 / (1 + 0.5 * m.widths[:k] / 1e-3)), rel=1e-13)


def test_barrier_holds_on_fine_pieces(builtin):
    assert check_barrier(builtin, SMALL_EPS, SMALL_NS, layer_only=True).passed


def test_barrier_fails_near_turning_point(ex1):
    # a_i >= alpha does not hold up to i = n/2, so the coarse-piece rows can violate it
    rl, rr = barrier_residuals(ex1, 1e-2, 32)
    assert rr.max() > 0
    r = check_barrier(ex1, (1e-2,), (32,))
    assert not r.passed and r.worst_case == (1e-2, 32, "right", 17)


def test_run_all_names(ex1):
    names = [r.name for r in run_all(ex1, (1e-3,), (16,))]
    assert len(names) == 7 and len(set(names)) == 7
