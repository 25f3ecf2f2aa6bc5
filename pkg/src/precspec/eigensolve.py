"""Symmetric-definite generalized eigenproblems ``A v = lambda B v``.

The pencil is reduced with the Cholesky factor ``B = L L^T`` to the
symmetric matrix ``L^{-1} A L^{-T}`` and solved densely.  Neumann pencils,
whose matrices both annihilate the constant vector, are first restricted to
an orthonormal complement of the all-ones vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import NumericalError, ValidationError

__all__ = [
    "Pencil",
    "Spectrum",
    "householder_complement",
    "deflate_constants",
    "make_pencil",
    "generalized_eigs",
    "resolvent_norm",
    "rayleigh_quotient",
]


def _dense(M):
    return M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)


@dataclass(frozen=True, eq=False)
class Pencil:
    """Dense working matrices plus the original (full) ones.

    ``basis`` is ``None`` or an ``(n, n - 1)`` orthonormal basis ``Q`` with
    ``A = Q^T A_full Q`` and ``B = Q^T B_full Q``.
    """

    A: np.ndarray
    B: np.ndarray
    A_full: object = None
    B_full: object = None
    basis: np.ndarray = None

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def lift(self, y):
        """Map reduced coordinates back to full coefficient vectors."""
        return y if self.basis is None else self.basis @ y


def make_pencil(A, B, deflate: bool = False) -> Pencil:
    """Pencil of two symmetric matrices; ``deflate`` removes the constant kernel."""
    if deflate:
        return deflate_constants(A, B)
    A_d, B_d = _dense(A), _dense(B)
    if A_d.shape != B_d.shape or A_d.shape[0] != A_d.shape[1]:
        raise ValidationError(f"pencil shapes differ or are not square: {A_d.shape}, {B_d.shape}")
    return Pencil(A_d, B_d, A, B, None)


def _reflector(n):
    u = np.full(n, 1.0 / np.sqrt(n))
    u[0] -= 1.0
    return u, 2.0 / (u @ u)


def householder_complement(n: int) -> np.ndarray:
    """Columns 2..n of the reflector mapping ``e_1`` to ``1/sqrt(n)``."""
    if n < 2:
        raise ValidationError("need at least two unknowns to deflate constants")
    u, beta = _reflector(n)
    H = np.eye(n) - beta * np.outer(u, u)
    return H[:, 1:]


def _reflect_both_sides(M, u, beta):
    # H M H with H = I - beta u u^T, in O(n^2)
    MH = M - beta * np.outer(M @ u, u)
    return MH - beta * np.outer(u, u @ MH)


def deflate_constants(A, B, tol=1e-10) -> Pencil:
    """Restrict a pencil with the constant vector in both kernels to its complement."""
    A_d, B_d = _dense(A), _dense(B)
    n = A_d.shape[0]
    ones = np.ones(n)
    for name, M in (("A", A_d), ("B", B_d)):
        scale = max(np.abs(M).max(), 1.0)
        if np.abs(M @ ones).max() > tol * scale:
            raise NumericalError(f"{name} does not annihilate constants; cannot deflate")
    Q = householder_complement(n)
    u, beta = _reflector(n)
    Ar = _reflect_both_sides(A_d, u, beta)[1:, 1:]
    Br = _reflect_both_sides(B_d, u, beta)[1:, 1:]
    Ar = 0.5 * (Ar + Ar.T)
    Br = 0.5 * (Br + Br.T)
    try:
        la.cholesky(Br, lower=True)
    except la.LinAlgError:
        raise NumericalError("deflated B is not positive definite") from None
    return Pencil(Ar, Br, A, B, Q)


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray = None

    def __len__(self):
        return len(self.values)

    @property
    def radius(self) -> float:
        return float(np.abs(self.values).max())


def generalized_eigs(p: Pencil, want_vectors: bool = False) -> Spectrum:
    """Ascending eigenvalues (and B-orthonormal vectors in full coordinates)."""
    try:
        L = la.cholesky(p.B, lower=True)
    except la.LinAlgError:
        raise NumericalError("B not positive definite; deflate or check coercivity") from None
    X = la.solve_triangular(L, p.A, lower=True)
    C = la.solve_triangular(L, X.T, lower=True)
    C = 0.5 * (C + C.T)
    if want_vectors:
        w, Y = la.eigh(C)
    else:
        w, Y = la.eigh(C, eigvals_only=True), None
    order = np.argsort(w, kind="stable")
    w = w[order]
    vecs = None
    if Y is not None:
        V = la.solve_triangular(L, Y[:, order], lower=True, trans="T")
        vecs = p.lift(V)
    return Spectrum(w, vecs)


def resolvent_norm(s: Spectrum, mu: complex) -> float:
    """``max_i 1 / |mu - lambda_i|``, the B-norm of ``(mu I - B^{-1} A)^{-1}``."""
    d = np.abs(complex(mu) - np.asarray(s.values))
    if d.size == 0:
        raise ValidationError("empty spectrum")
    if d.min() == 0.0:
        raise NumericalError(f"shift {mu} is an eigenvalue; the resolvent is unbounded")
    return float(1.0 / d.min())


def rayleigh_quotient(p: Pencil, v) -> float:
    """``v^T A v / v^T B v``; full-length vectors use the undeflated matrices."""
    v = np.asarray(v, dtype=float)
    if len(v) == p.n:
        A, B = p.A, p.B
    elif p.A_full is not None and len(v) == p.A_full.shape[0]:
        A, B = p.A_full, p.B_full
    else:
        raise ValidationError(f"vector of length {len(v)} does not fit the pencil")
    den = float(v @ (B @ v))
    if den <= 0.0:
        raise ValidationError("vector has zero B-norm")
    return float(v @ (A @ v)) / den
