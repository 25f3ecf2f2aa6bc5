"""P1 stiffness matrices with scalar coefficients.

Every triangle's contribution is ``c_T * area_T * G_T^T G_T`` where ``G_T``
holds the (constant) gradients of the three hat functions and ``c_T`` is the
quadrature average of the coefficient over the triangle.  Assembling a field
therefore gives exactly the same matrix as assembling the per-triangle
constant field of its averages, which is what makes the localization
statements checkable on the computed matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .coeff import PerTriangleConstant, as_field
from .errors import NumericalError, ValidationError
from .mesh import Mesh, boundary_nodes

__all__ = [
    "QuadratureRule",
    "AssembledPencil",
    "element_stiffness",
    "element_gradients",
    "triangle_averages",
    "assemble_stiffness",
    "assemble_pencil",
    "apply_dirichlet",
    "to_coo_text",
]


class QuadratureRule(Enum):
    CENTROID = "centroid"
    MIDPOINT3 = "midpoint3"

    @classmethod
    def coerce(cls, rule):
        if isinstance(rule, cls):
            return rule
        try:
            return cls(rule)
        except ValueError:
            raise ValidationError(f"unknown quadrature rule {rule!r}; "
                                  "use 'centroid' or 'midpoint3'") from None

    @property
    def barycentric(self):
        if self is QuadratureRule.CENTROID:
            return np.array([[1 / 3, 1 / 3, 1 / 3]])
        return np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])

    @property
    def weights(self):
        """Weights relative to the triangle area (they sum to one)."""
        if self is QuadratureRule.CENTROID:
            return np.array([1.0])
        return np.array([1 / 3, 1 / 3, 1 / 3])


def element_gradients(vertices):
    """Gradients of the three hat functions and the area of each triangle.

    ``vertices`` has shape ``(..., 3, 2)``; returns ``(grads (..., 3, 2), area (...))``.
    """
    v = np.asarray(vertices, dtype=float)
    x, y = v[..., 0], v[..., 1]
    det = (x[..., 1] - x[..., 0]) * (y[..., 2] - y[..., 0]) \
        - (x[..., 2] - x[..., 0]) * (y[..., 1] - y[..., 0])
    if np.any(det <= 0.0):
        raise ValidationError("degenerate or clockwise triangle in stiffness computation")
    # grad phi_i = (y_{i+1} - y_{i+2}, x_{i+2} - x_{i+1}) / det
    gx = np.stack([y[..., 1] - y[..., 2], y[..., 2] - y[..., 0], y[..., 0] - y[..., 1]], -1)
    gy = np.stack([x[..., 2] - x[..., 1], x[..., 0] - x[..., 2], x[..., 1] - x[..., 0]], -1)
    grads = np.stack([gx, gy], -1) / det[..., None, None]
    return grads, 0.5 * det


def _unit_stiffness(vertices):
    grads, area = element_gradients(vertices)
    S = np.einsum("...id,...jd->...ij", grads, grads) * area[..., None, None]
    # exact zero row sums: diagonal is minus the off-diagonal sum
    idx = np.arange(3)
    off = S.copy()
    off[..., idx, idx] = 0.0
    S[..., idx, idx] = -off.sum(-1)
    return S


def element_stiffness(vertices, coeff: float = 1.0) -> np.ndarray:
    """3x3 matrix of ``coeff * integral grad(phi_j) . grad(phi_i)`` over one triangle."""
    return coeff * _unit_stiffness(np.asarray(vertices, dtype=float))


def triangle_averages(mesh: Mesh, field, rule=QuadratureRule.MIDPOINT3, name="coefficient"):
    """Quadrature averages of ``field`` on every triangle.

    Raises
    ------
    ValidationError
        If the field is nonpositive at some quadrature point.
    """
    field = as_field(field)
    rule = QuadratureRule.coerce(rule)
    if isinstance(field, PerTriangleConstant):
        if field.mesh is not mesh:
            raise ValidationError(f"{name}: per-triangle field bound to a different mesh")
        vals = field.values
        if np.any(vals <= 0.0):
            t = int(np.flatnonzero(vals <= 0.0)[0])
            raise ValidationError(f"{name} is nonpositive ({vals[t]!r}) on triangle {t}")
        return vals.copy()
    pts = np.einsum("qk,tkd->tqd", rule.barycentric, mesh.nodes[mesh.triangles])
    vals = field(pts[..., 0], pts[..., 1])
    bad = ~(vals > 0.0)
    if np.any(bad):
        t, q = (int(i) for i in np.argwhere(bad)[0])
        raise ValidationError(
            f"{name} is nonpositive ({vals[t, q]!r}) on triangle {t} at point "
            f"({pts[t, q, 0]!r}, {pts[t, q, 1]!r})")
    return vals @ rule.weights


def _assemble(mesh: Mesh, averages: np.ndarray):
    S = _unit_stiffness(mesh.nodes[mesh.triangles]) * averages[:, None, None]
    tri = mesh.triangles
    n = mesh.n_nodes
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    keys, slot = np.unique(rows * n + cols, return_inverse=True)
    data = np.zeros(len(keys))
    # np.add.at is unbuffered and sequential: sums run in ascending triangle order
    np.add.at(data, slot.ravel(), S.ravel())
    r, c = np.divmod(keys, n)
    indptr = np.searchsorted(r, np.arange(n + 1))
    return sp.csr_matrix((data, c, indptr), shape=(n, n))


def assemble_stiffness(mesh: Mesh, field, rule=QuadratureRule.MIDPOINT3, bc="neumann"):
    """Assemble ``integral c grad(phi_j) . grad(phi_i)``.

    Returns
    -------
    M : scipy.sparse.csr_matrix
        Full matrix for ``bc="neumann"``; boundary rows and columns removed
        for ``bc="dirichlet"``.
    averages : ndarray
        Per-triangle effective coefficient.
    """
    avg = triangle_averages(mesh, field, rule)
    M = _assemble(mesh, avg)
    if _bc(bc) == "dirichlet":
        M, _ = apply_dirichlet(M, boundary_nodes(mesh))
    return M, avg


def apply_dirichlet(M, boundary):
    """Drop boundary rows and columns.

    Returns the reduced matrix and the array of kept (interior) node indices;
    row ``i`` of the reduced matrix belongs to node ``interior[i]``.
    """
    n = M.shape[0]
    boundary = np.unique(np.asarray(boundary, dtype=np.int64))
    if boundary.size and (boundary.min() < 0 or boundary.max() >= n):
        raise ValidationError("boundary node index out of range")
    keep = np.setdiff1d(np.arange(n), boundary)
    if keep.size == 0:
        raise NumericalError("every node is a boundary node; the reduced system is empty")
    R = sp.csr_matrix(M)[keep][:, keep]
    R.sort_indices()
    return R, keep


def _bc(bc):
    bc = str(bc).lower()
    if bc not in ("dirichlet", "neumann"):
        raise ValidationError(f"unknown boundary condition {bc!r}")
    return bc


@dataclass(frozen=True, eq=False)
class AssembledPencil:
    """Stiffness matrices of k and g on one mesh.

    ``dofs`` lists the node belonging to each matrix row (all nodes for
    Neumann, interior nodes for Dirichlet).
    """

    A: sp.csr_matrix
    B: sp.csr_matrix
    mesh: Mesh
    bc: str
    rule: QuadratureRule
    k_avg: np.ndarray
    g_avg: np.ndarray
    dofs: np.ndarray

    @property
    def ratio_avg(self) -> np.ndarray:
        return self.k_avg / self.g_avg

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def deflate(self) -> bool:
        return self.bc == "neumann"

    def constant_fields(self):
        """Per-triangle constant fields that reassemble to this pencil."""
        return (PerTriangleConstant(self.k_avg, self.mesh),
                PerTriangleConstant(self.g_avg, self.mesh))

    def with_k_averages(self, k_avg) -> "AssembledPencil":
        """Pencil with ``A`` reassembled from the given per-triangle k values."""
        k_avg = np.asarray(k_avg, dtype=float)
        A = _assemble(self.mesh, k_avg)
        if self.bc == "dirichlet":
            A, _ = apply_dirichlet(A, boundary_nodes(self.mesh))
        return AssembledPencil(A, self.B, self.mesh, self.bc, self.rule,
                               k_avg, self.g_avg, self.dofs)


def assemble_pencil(mesh: Mesh, k, g, bc="neumann", rule=QuadratureRule.MIDPOINT3):
    bc = _bc(bc)
    rule = QuadratureRule.coerce(rule)
    kf, gf = as_field(k), as_field(g)
    k_avg = triangle_averages(mesh, kf, rule, "k")
    g_avg = triangle_averages(mesh, gf, rule, "g")
    A = _assemble(mesh, k_avg)
    B = _assemble(mesh, g_avg)
    if bc == "dirichlet":
        bnd = boundary_nodes(mesh)
        A, dofs = apply_dirichlet(A, bnd)
        B, _ = apply_dirichlet(B, bnd)
    else:
        dofs = np.arange(mesh.n_nodes)
    return AssembledPencil(A, B, mesh, bc, rule, k_avg, g_avg, dofs)


def to_coo_text(M) -> str:
    """``i j value`` lines for debugging dumps."""
    C = sp.coo_matrix(M)
    order = np.lexsort((C.col, C.row))
    return "".join(f"{C.row[i]} {C.col[i]} {C.data[i]!r}\n" for i in order)

