import numpy as np
import pytest
import scipy.linalg as la
from hypothesis import given, settings, strategies as st

from oracles import charpoly_eigs, random_integer_pencil, resolvent_norm_svd
from precspec import (NumericalError, ValidationError, assemble_pencil, build_structured_mesh,
                      deflate_constants, generalized_eigs, make_pencil, bump_problem,
                      rayleigh_quotient, resolvent_norm, solve_eigs)
from precspec.eigensolve import householder_complement


def test_neumann_toy_deflation():
    M = np.array([[1.0, -1.0], [-1.0, 1.0]])
    p = deflate_constants(M, M)
    assert p.n == 1
    np.testing.assert_allclose(generalized_eigs(p).values, [1.0], rtol=1e-15)


def test_householder_complement_is_orthonormal():
    for n in (2, 3, 10):
        Q = householder_complement(n)
        assert Q.shape == (n, n - 1)
        np.testing.assert_allclose(Q.T @ Q, np.eye(n - 1), atol=1e-14)
        np.testing.assert_allclose(Q.T @ np.ones(n), 0.0, atol=1e-14)


def test_deflated_spectrum_matches_full_singular_pencil():
    m = build_structured_mesh((0, 1, 0, 1), 1, 1)
    p = assemble_pencil(m, "2+x*y", "1+x", "neumann")
    A, B = p.A.toarray(), p.B.toarray()
    red = generalized_eigs(make_pencil(A, B, deflate=True)).values
    assert len(red) == 3
    # the rank-one term only moves the constant mode, which goes to 0
    full = la.eigh(A, B + np.ones((4, 4)), eigvals_only=True)
    np.testing.assert_allclose(red, np.sort(full)[1:], rtol=1e-12)


def test_deflation_rejects_non_singular():
    with pytest.raises(NumericalError, match="annihilate"):
        deflate_constants(np.eye(3), np.eye(3))


def test_singular_b_without_deflation_fails():
    M = np.array([[1.0, -1.0], [-1.0, 1.0]])
    with pytest.raises(NumericalError, match="not positive definite"):
        generalized_eigs(make_pencil(M, M))


def test_trivial_pencils():
    B = np.diag([2.0, 3.0, 5.0])
    np.testing.assert_allclose(generalized_eigs(make_pencil(B, B)).values, 1.0, rtol=1e-12)
    np.testing.assert_array_equal(generalized_eigs(make_pencil(np.diag([2.0, 1.0]),
                                                               np.eye(2))).values, [1.0, 2.0])


@pytest.mark.parametrize("bc", ["neumann", "dirichlet"])
def test_constant_ratio_gives_single_eigenvalue(bc):
    m = build_structured_mesh((-1, 1, -1, 1), 8, 8)
    lam = solve_eigs(assemble_pencil(m, "2.5*(1+50*exp(-5*(x^2+y^2)))",
                                     "1+50*exp(-5*(x^2+y^2))", bc)).values
    assert np.abs(lam - 2.5).max() <= 1e-12 * 2.5


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eigs_match_characteristic_polynomial(n, seed):
    A, B = random_integer_pencil(np.random.default_rng(seed), n)
    got = generalized_eigs(make_pencil(A.astype(float), B.astype(float))).values
    ref = charpoly_eigs(A, B)
    scale = max(np.abs(ref).max(), 1e-300)
    assert np.abs(got - ref).max() <= 1e-8 * scale


def test_vectors_are_b_orthonormal_with_small_residuals():
    p = bump_problem(6, bc="dirichlet").assemble()
    s = solve_eigs(p, want_vectors=True)
    A, B, V = p.A.toarray(), p.B.toarray(), s.vectors
    np.testing.assert_allclose(V.T @ B @ V, np.eye(p.n), atol=1e-8)
    nA, nB = la.norm(A), la.norm(B)
    for i, lam in enumerate(s.values):
        r = la.norm(A @ V[:, i] - lam * B @ V[:, i])
        assert r <= 1e-8 * (nA + abs(lam) * nB)
    assert np.all(np.diff(s.values) >= 0)


def test_neumann_vectors_are_lifted():
    p = bump_problem(4).assemble()
    s = solve_eigs(p, want_vectors=True)
    assert s.vectors.shape == (p.n, p.n - 1)
    np.testing.assert_allclose(s.vectors.T @ p.B.toarray() @ s.vectors, np.eye(p.n - 1), atol=1e-8)


def test_spectrum_within_effective_ratio_range():
    p = bump_problem(8, bc="neumann").assemble()
    lam = solve_eigs(p).values
    lo, hi = p.ratio_avg.min(), p.ratio_avg.max()
    assert lam.min() >= lo * (1 - 1e-10) and lam.max() <= hi * (1 + 1e-10)


def test_resolvent_examples():
    s = generalized_eigs(make_pencil(np.diag([1.0, 2.0, 4.0]), np.eye(3)))
    assert resolvent_norm(s, 1.0 + 1e-3j) == pytest.approx(1e3, rel=1e-12)
    assert resolvent_norm(s, 3.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(NumericalError):
        resolvent_norm(s, 2.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 50), st.integers(0, 2**32 - 1))
def test_resolvent_matches_dense_oracle(n, seed):
    rng = np.random.default_rng(seed)
    A, B = random_integer_pencil(rng, n)
    A, B = A.astype(float), B.astype(float)
    s = generalized_eigs(make_pencil(A, B))
    mu = complex(rng.uniform(-5, 5), rng.uniform(0.05, 2))
    r = resolvent_norm(s, mu)
    assert r * np.abs(mu - s.values).min() == pytest.approx(1.0, rel=1e-15)
    assert r == pytest.approx(resolvent_norm_svd(A, B, mu), rel=1e-8)


def test_rayleigh_quotient():
    p = bump_problem(4, bc="dirichlet").assemble()
    s = solve_eigs(p, want_vectors=True)
    pen = make_pencil(p.A, p.B)
    for i in (0, 3, p.n - 1):
        assert rayleigh_quotient(pen, s.vectors[:, i]) == pytest.approx(s.values[i], abs=1e-10)
    r = p.ratio_avg
    for j, node in enumerate(p.dofs[:10]):
        e = np.zeros(p.n)
        e[j] = 1.0
        from precspec import node_support
        sup = node_support(p.mesh, int(node)).triangles
        q = rayleigh_quotient(pen, e)
        assert r[sup].min() * (1 - 1e-12) <= q <= r[sup].max() * (1 + 1e-12)
    c = assemble_pencil(p.mesh, "2.5*(1+x^2)", "1+x^2", "dirichlet")
    assert rayleigh_quotient(make_pencil(c.A, c.B), np.ones(c.n)) == pytest.approx(2.5, rel=1e-12)
    with pytest.raises(ValidationError):
        rayleigh_quotient(pen, np.ones(3))
