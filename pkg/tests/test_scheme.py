import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from turnpoint.mesh import MeshConfig, build_mesh
from turnpoint.problem import ProblemSpec, example1
from turnpoint.scheme import (StencilKind, assemble, assemble_upwind, central_row, check_assumptions,
                              classify, midpoint_row, upwind_row)


def mesh_for(problem, n, eps, tau0=0.8, **kw):
    return build_mesh(MeshConfig(n=n, epsilon=eps, tau0=tau0, domain_left=problem.domain_left,
                                 domain_right=problem.domain_right, **kw))


def flat(a=0.0, b=1.0, f=0.0):
    return ProblemSpec(a=lambda x: a + 0 * x, b=lambda x: b + 0 * x, f=lambda x: f + 0 * x,
                       alpha=1.0, beta=1.0)


# --- classify --------------------------------------------------------------------

def test_classify_examples():
    assert classify(1, 16, 2.0) is StencilKind.CENTRAL
    assert classify(4, 16, 0.5) is StencilKind.MIDPOINT_FORWARD
    assert classify(12, 16, -0.5) is StencilKind.MIDPOINT_BACKWARD
    assert classify(13, 16, -0.5) is StencilKind.CENTRAL


def test_classify_tie_is_forward():
    assert classify(8, 16, 0.0) is StencilKind.MIDPOINT_FORWARD


@pytest.mark.parametrize("i", [0, 16, -1])
def test_classify_range(i):
    with pytest.raises(IndexError):
        classify(i, 16, 1.0)


@given(st.integers(2, 64), st.data())
def test_classify_partition(q, data):
    n = 4 * q
    i = data.draw(st.integers(1, n - 1))
    a = data.draw(st.floats(-10, 10).filter(lambda v: v != 0))
    k = classify(i, n, a)
    if i < q or i > 3 * q:
        assert k is StencilKind.CENTRAL
    else:
        assert k is (StencilKind.MIDPOINT_FORWARD if a > 0 else StencilKind.MIDPOINT_BACKWARD)


def test_minimal_mesh_layout():
    p = example1()
    s = assemble(p, mesh_for(p, 8, 1e-3), 1e-3)
    kinds = s.kinds
    assert kinds[0] is StencilKind.CENTRAL and kinds[6] is StencilKind.CENTRAL
    assert all(k is not StencilKind.CENTRAL for k in kinds[1:3] + kinds[4:6])


# --- individual rows -----------------------------------------------------------------

def test_central_row_pure_diffusion():
    p = flat(a=0.0, b=1.0)
    m = build_mesh(MeshConfig(n=16, epsilon=1.0))
    h = 1 / 16
    r = central_row(3, m, p, 1.0)
    assert r.p_l == pytest.approx(1 / h ** 2) and r.p_r == pytest.approx(1 / h ** 2)
    assert r.p_c == pytest.approx(-2 / h ** 2 - 1)


def test_central_row_high_precision():
    # mpmath evaluation of the central coefficients, eps = 1e-2, n = 32, i = 1
    p = example1()
    r = central_row(1, mesh_for(p, 32, 1e-2), p, 1e-2)
    assert r.p_l == pytest.approx(546.00858422445043768, rel=1e-12)
    assert r.p_c == pytest.approx(-1669.0951848044862383, rel=1e-12)
    assert r.p_r == pytest.approx(1119.0866005800358006, rel=1e-12)


def test_midpoint_row_high_precision():
    p = example1()
    r = midpoint_row(8, mesh_for(p, 32, 1e-2), p, 1e-2, "forward")
    assert r.p_l == pytest.approx(92.332482616893658071, rel=1e-12)
    assert r.p_c == pytest.approx(-129.75306344217705724, rel=1e-12)
    assert r.p_r == pytest.approx(33.420580825283399172, rel=1e-12)


def test_midpoint_rows_mirror_without_convection():
    p = flat(a=0.0, b=3.0)
    m = build_mesh(MeshConfig(n=16, epsilon=1.0))
    fw = midpoint_row(8, m, p, 0.5, "forward")
    bw = midpoint_row(8, m, p, 0.5, "backward")
    assert fw.p_l == pytest.approx(bw.p_r) and fw.p_r == pytest.approx(bw.p_l)
    assert fw.p_c == pytest.approx(bw.p_c)
    assert fw.p_l == pytest.approx(0.5 * 256) and fw.p_r == pytest.approx(0.5 * 256 - 1.5)


def test_midpoint_row_bad_direction():
    p = example1()
    with pytest.raises(ValueError):
        midpoint_row(8, mesh_for(p, 32, 1e-2), p, 1e-2, "sideways")


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-6])
@pytest.mark.parametrize("i", [5, 8, 10, 14])
def test_forward_diagonal_expansion(i, eps):
    p = ProblemSpec(a=lambda x: 3 - 6 * x, b=lambda x: 2 + x * x, f=lambda x: x, alpha=3.0)
    m = mesh_for(p, 32, eps)
    r = midpoint_row(i, m, p, eps, "forward")
    x = m.nodes
    hi, hn = x[i] - x[i - 1], x[i + 1] - x[i]
    hh = (hi + hn) / 2
    a_half = (p.a(x[i]) + p.a(x[i + 1])) / 2
    direct = -eps / (hi * hh) - eps / (hn * hh) - a_half / hn - p.b(x[i]) / 2
    assert r.p_c == pytest.approx(direct, rel=1e-12)


# --- assembly ----------------------------------------------------------------------

@pytest.mark.parametrize("eps", [1.0, 1e-1, 1e-3, 1e-6, 1e-9])
@pytest.mark.parametrize("n", [8, 16, 64, 256])
def test_assembled_rows_match_row_builders(builtin, eps, n):
    m = mesh_for(builtin, n, eps)
    s = assemble(builtin, m, eps)
    for i in range(1, n):
        k = s.kinds[i - 1]
        if k is StencilKind.CENTRAL:
            ref = central_row(i, m, builtin, eps)
        else:
            ref = midpoint_row(i, m, builtin, eps,
                               "forward" if k is StencilKind.MIDPOINT_FORWARD else "backward")
        got = s.row(i)
        assert (got.p_l, got.p_c, got.p_r, got.rhs) == pytest.approx(
            (ref.p_l, ref.p_c, ref.p_r, ref.rhs), rel=1e-13, abs=1e-300)
        assert got.kind is k
        if k is StencilKind.MIDPOINT_FORWARD:
            x = m.nodes
            assert got.rhs == pytest.approx((builtin.f(x[i]) + builtin.f(x[i + 1])) / 2)


def test_boundary_rows(ex1):
    s = assemble(ex1, mesh_for(ex1, 16, 1e-3), 1e-3)
    assert (s.diag[0], s.sup[0], s.rhs[0]) == (1.0, 0.0, 1.0)
    assert (s.diag[-1], s.sub[-1], s.rhs[-1]) == (1.0, 0.0, 1.0)
    assert len(s.kinds) == 15


def test_turning_point_row(ex1):
    # forward at a_i = 0 unless p_r would turn nonpositive
    for eps, expected in ((1.0, StencilKind.MIDPOINT_FORWARD), (1e-6, StencilKind.CENTRAL)):
        s = assemble(ex1, mesh_for(ex1, 16, eps), eps)
        assert ex1.a(s.mesh.nodes[8]) == 0.0
        assert s.kinds[7] is expected


def test_example1_coarse_system_signs(ex1):
    s = assemble(ex1, mesh_for(ex1, 16, 1.0), 1.0)
    d = s.diag[1:-1]
    assert np.all(d < 0)
    assert np.all(np.abs(d) > np.abs(s.sub[1:-1]) + np.abs(s.sup[1:-1]))


def test_assembly_is_deterministic(ex2):
    m = mesh_for(ex2, 64, 1e-5)
    s1, s2 = assemble(ex2, m, 1e-5), assemble(ex2, m, 1e-5)
    for name in ("sub", "diag", "sup", "rhs"):
        assert getattr(s1, name).tobytes() == getattr(s2, name).tobytes()


def test_domain_mismatch_rejected(ex1):
    m = build_mesh(MeshConfig(n=16, epsilon=1e-3, domain_left=-1.0, domain_right=1.0))
    with pytest.raises(ValueError):
        assemble(ex1, m, 1e-3)


@pytest.mark.parametrize("scheme", [assemble, assemble_upwind])
@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-5, 1e-9])
@pytest.mark.parametrize("n", [16, 64, 512])
def test_row_sum_identity(builtin, scheme, eps, n):
    s = scheme(builtin, mesh_for(builtin, n, eps), eps)
    x = s.mesh.nodes
    b = builtin.b(x)
    for i in range(1, n):
        k = s.kinds[i - 1]
        if k is StencilKind.MIDPOINT_FORWARD:
            react = (b[i] + b[i + 1]) / 2
        elif k is StencilKind.MIDPOINT_BACKWARD:
            react = (b[i - 1] + b[i]) / 2
        else:
            react = b[i]
        total = s.sub[i] + s.diag[i] + s.sup[i] + react
        assert abs(total) <= 1e-13 * (abs(s.sub[i]) + abs(s.diag[i]) + abs(s.sup[i]))


# --- upwind baseline -------------------------------------------------------------------

def test_upwind_equals_central_without_convection():
    p = flat(a=0.0, b=2.0, f=1.0)
    m = build_mesh(MeshConfig(n=32, epsilon=1e-3))
    s = assemble_upwind(p, m, 1e-3)
    for i in range(1, 32):
        c = central_row(i, m, p, 1e-3)
        r = s.row(i)
        assert (r.p_l, r.p_c, r.p_r, r.rhs) == pytest.approx((c.p_l, c.p_c, c.p_r, c.rhs), rel=1e-14)


@pytest.mark.parametrize("eps", [1.0, 1e-1, 1e-3, 1e-5, 1e-7, 1e-9])
@pytest.mark.parametrize("n", [8, 16, 64, 256, 1024])
@pytest.mark.parametrize("tau0", [0.8, 2.5, 100.0])
def test_upwind_is_always_negative_type(builtin, eps, n, tau0):
    s = assemble_upwind(builtin, mesh_for(builtin, n, eps, tau0), eps)
    assert np.all(s.sub[1:-1] > 0) and np.all(s.sup[1:-1] > 0)
    assert np.all(s.sub[1:-1] + s.diag[1:-1] + s.sup[1:-1] < 0)


def test_upwind_rows_match_row_builder(ex2):
    m = mesh_for(ex2, 32, 1e-4)
    s = assemble_upwind(ex2, m, 1e-4)
    for i in range(1, 32):
        r, ref = s.row(i), upwind_row(i, m, ex2, 1e-4)
        assert (r.p_l, r.p_c, r.p_r) == pytest.approx((ref.p_l, ref.p_c, ref.p_r), rel=1e-13)
        assert r.kind is ref.kind


# --- assumption diagnostics ----------------------------------------------------------------

def test_assumptions_hold_for_fine_grid(ex1):
    d = check_assumptions(ex1, mesh_for(ex1, 1024, 1e-8, 2.5), 1e-8)
    assert d.tau0_lhs == pytest.approx(10.0)
    assert d.tau0_rhs == pytest.approx(1024 / math.log(1024))
    assert d.reaction_lhs == pytest.approx(8 / 1024)
    assert d.condition1 and d.condition2 and d.passed


def test_condition1_fails_on_coarse_grid(ex1):
    d = check_assumptions(ex1, mesh_for(ex1, 8, 1e-8, 2.5), 1e-8)
    assert d.tau0_rhs == pytest.approx(8 / math.log(8))
    assert not d.condition1 and not d.passed
    assert d.peclet_ratio == pytest.approx(2 * 2.5 * 2 * math.log(8) / 8)


def test_zero_reaction_passes_condition2():
    p = ProblemSpec(a=lambda x: 1 - 2 * x, b=lambda x: 0 * x, f=lambda x: 0 * x, alpha=1.0, beta=1.0)
    d = check_assumptions(p, build_mesh(MeshConfig(n=16, epsilon=1e-3)), 1e-3)
    assert d.reaction_lhs == 0.0 and d.condition2
