import numpy as np
import pytest
import scipy.linalg as la

from conftest import random_config
from precspec import (BUMP_G, BUMP_K, PerTriangleConstant, QuadratureRule, ValidationError,
                      apply_dirichlet, assemble_pencil, assemble_stiffness, boundary_nodes,
                      build_structured_mesh, element_stiffness, bump_problem)
from precspec.assembly import to_coo_text, triangle_averages

UNIT = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def test_unit_right_triangle_element():
    # hand integration of P1 gradients
    ref = 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]], dtype=float)
    np.testing.assert_allclose(element_stiffness(UNIT), ref, atol=1e-15)
    np.testing.assert_allclose(element_stiffness(UNIT, 3.5), 3.5 * ref, atol=1e-15)


def test_element_row_sums_vanish(rng):
    for _ in range(20):
        v = rng.normal(size=(3, 2))
        d1, d2 = v[1] - v[0], v[2] - v[0]
        if d1[0] * d2[1] - d1[1] * d2[0] < 0:
            v = v[[0, 2, 1]]
        S = element_stiffness(v)
        for i in range(3):
            j, k = [m for m in range(3) if m != i]
            assert S[i, i] == -(S[i, j] + S[i, k])
        assert np.abs(S.sum(1)).max() <= 4e-16 * np.abs(S).max()
        assert np.all(S == S.T)


def test_neumann_constant_kernel():
    m = build_structured_mesh((0, 1, 0, 1), 5, 4)
    A, _ = assemble_stiffness(m, 1.0, bc="neumann")
    assert np.abs(A @ np.ones(m.n_nodes)).max() <= 1e-12


def test_dirichlet_two_by_two_is_four(unit2):
    A, _ = assemble_stiffness(unit2, 1.0, bc="dirichlet")
    assert A.shape == (1, 1)
    assert A.toarray()[0, 0] == pytest.approx(4.0, rel=1e-15)


def test_apply_dirichlet(unit2):
    A, _ = assemble_stiffness(unit2, "1+x*y", bc="neumann")
    R, keep = apply_dirichlet(A, boundary_nodes(unit2))
    assert R.shape == (1, 1) and keep.tolist() == [4]
    R0, keep0 = apply_dirichlet(A, [])
    assert (R0 != A).nnz == 0 and keep0.tolist() == list(range(9))


def test_dirichlet_reduced_is_positive_definite():
    p = bump_problem(6, bc="dirichlet").assemble()
    la.cholesky(p.A.toarray())
    la.cholesky(p.B.toarray())


def test_linearity_k_equals_scaled_g():
    m = build_structured_mesh((-1, 1, -1, 1), 6, 6)
    p = assemble_pencil(m, f"2.5*({BUMP_G})", BUMP_G, "neumann")
    A, B = p.A.toarray(), p.B.toarray()
    assert np.abs(A - 2.5 * B).max() <= 1e-14 * np.abs(A).max()


@pytest.mark.parametrize("bc", ["neumann", "dirichlet"])
@pytest.mark.parametrize("rule", ["centroid", "midpoint3"])
def test_quadrature_consistency_bitwise(bc, rule):
    m = build_structured_mesh((-1, 1, -1, 1), 7, 5)
    p = assemble_pencil(m, BUMP_K, BUMP_G, bc, rule)
    q = assemble_pencil(m, PerTriangleConstant(p.k_avg, m), PerTriangleConstant(p.g_avg, m), bc, rule)
    for X, Y in ((p.A, q.A), (p.B, q.B)):
        assert np.array_equal(X.indptr, Y.indptr) and np.array_equal(X.indices, Y.indices)
        assert np.array_equal(X.data, Y.data)


@pytest.mark.parametrize("rule", ["centroid", "midpoint3"])
def test_effective_ratio_between_quadrature_extremes(rule):
    m = build_structured_mesh((-1, 1, -1, 1), 6, 6)
    p = assemble_pencil(m, BUMP_K, BUMP_G, "neumann", rule)
    q = QuadratureRule.coerce(rule)
    pts = np.einsum("qk,tkd->tqd", q.barycentric, m.nodes[m.triangles])
    from precspec import RatioField
    r = RatioField(BUMP_K, BUMP_G)(pts[..., 0], pts[..., 1])
    tol = 1e-14 * r.max()
    assert np.all(p.ratio_avg >= r.min(1) - tol) and np.all(p.ratio_avg <= r.max(1) + tol)


def test_symmetry_is_exact(rng):
    cfg = random_config(rng, nx=6, ny=7)
    p = cfg.assemble()
    for M in (p.A, p.B):
        assert (M != M.T).nnz == 0


def test_neumann_psd_with_one_dimensional_kernel():
    p = bump_problem(4).assemble()
    w = np.linalg.eigvalsh(p.A.toarray())
    scale = np.abs(w).max()
    assert abs(w[0]) <= 1e-12 * scale and w[1] > 1e-8 * scale
    ones = np.ones(p.n)
    assert np.abs(p.A @ ones).max() <= 1e-12 * np.abs(p.A).max()
    assert np.abs(p.B @ ones).max() <= 1e-12 * np.abs(p.B).max()


def test_nonpositive_field_names_point(unit2):
    with pytest.raises(ValidationError, match=r"triangle \d+ at point"):
        triangle_averages(unit2, "x-0.5", "midpoint3", "g")


def test_bad_quadrature_and_bc(unit2):
    with pytest.raises(ValidationError):
        assemble_pencil(unit2, 1.0, 1.0, "neumann", "gauss7")
    with pytest.raises(ValidationError):
        assemble_pencil(unit2, 1.0, 1.0, "robin")


def test_coo_text_is_deterministic(unit2):
    A, _ = assemble_stiffness(unit2, "1+x^2")
    t1, t2 = to_coo_text(A), to_coo_text(assemble_stiffness(unit2, "1+x^2")[0])
    assert t1 == t2 and t1.count("\n") >= A.nnz
