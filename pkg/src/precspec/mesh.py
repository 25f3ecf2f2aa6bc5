"""Conforming P1 triangulations of rectangles.

Nodes are stored as an ``(N, 2)`` float array and triangles as an ``(T, 3)``
integer array of counterclockwise vertex indices.  Structured meshes number
their nodes row by row (x fastest) and split every cell along the diagonal
from its lower-left to its upper-right corner.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError

__all__ = [
    "Mesh",
    "Support",
    "MeshHierarchy",
    "build_structured_mesh",
    "refine_uniform",
    "node_support",
    "boundary_nodes",
    "read_mesh",
    "write_mesh",
    "signed_areas",
]


def signed_areas(nodes, triangles):
    p0 = nodes[triangles[:, 0]]
    p1 = nodes[triangles[:, 1]]
    p2 = nodes[triangles[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                  - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation.

    Parameters
    ----------
    nodes : array_like, shape (N, 2)
    triangles : array_like, shape (T, 3)
        Counterclockwise node indices.
    domain : tuple of float, optional
        Bounding rectangle ``(ax, bx, ay, by)``.  Inferred from the nodes
        when omitted.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    domain: tuple = None
    _node_triangles: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        tris = np.array(self.triangles, dtype=np.int64)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise ValidationError("nodes must have shape (N, 2)")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise ValidationError("triangles must have shape (T, 3)")
        if not np.all(np.isfinite(nodes)):
            raise ValidationError("node coordinates must be finite")
        if tris.size and (tris.min() < 0 or tris.max() >= len(nodes)):
            bad = int(np.flatnonzero((tris < 0).any(1) | (tris >= len(nodes)).any(1))[0])
            raise ValidationError(
                f"triangle {bad} references node outside 0..{len(nodes) - 1}: {tris[bad].tolist()}")
        areas = signed_areas(nodes, tris)
        if np.any(areas <= 0.0):
            bad = int(np.flatnonzero(areas <= 0.0)[0])
            raise ValidationError(
                f"triangle {bad} has nonpositive signed area {areas[bad]!r} "
                "(degenerate or clockwise)")
        nodes.setflags(write=False)
        tris.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triangles", tris)
        if self.domain is None:
            dom = (float(nodes[:, 0].min()), float(nodes[:, 0].max()),
                   float(nodes[:, 1].min()), float(nodes[:, 1].max()))
            object.__setattr__(self, "domain", dom)
        else:
            object.__setattr__(self, "domain", tuple(float(v) for v in self.domain))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def areas(self) -> np.ndarray:
        return signed_areas(self.nodes, self.triangles)

    def node_triangles(self):
        """List of ascending triangle index arrays incident to each node."""
        if self._node_triangles is None:
            inc = [[] for _ in range(self.n_nodes)]
            for t, tri in enumerate(self.triangles.tolist()):
                for v in tri:
                    inc[v].append(t)
            object.__setattr__(self, "_node_triangles",
                               [np.array(ts, dtype=np.int64) for ts in inc])
        return self._node_triangles

    def edges(self):
        """Unique undirected edges as ``(E, 2)`` sorted pairs, with usage counts."""
        e = np.concatenate([self.triangles[:, [0, 1]],
                            self.triangles[:, [1, 2]],
                            self.triangles[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0, return_counts=True)

    def locate(self, point, tol=1e-12):
        """Index of the first triangle containing ``point`` (or ``None``)."""
        p = np.asarray(point, dtype=float)
        x = self.nodes[self.triangles]
        lam = _barycentric(x, p)
        hit = np.flatnonzero((lam >= -tol).all(axis=1))
        return int(hit[0]) if hit.size else None

    def max_support_diameter(self) -> float:
        return max(node_support(self, j).diameter for j in range(self.n_nodes))


def _barycentric(x, p):
    # x: (T, 3, 2) vertex coordinates
    d = signed_areas_from_coords(x)
    l0 = _area2(p, x[:, 1], x[:, 2]) / d
    l1 = _area2(x[:, 0], p, x[:, 2]) / d
    return np.stack([l0, l1, 1.0 - l0 - l1], axis=1)


def _area2(a, b, c):
    a, b, c = np.broadcast_arrays(a, b, c)
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (c[..., 0] - a[..., 0]) * (b[..., 1] - a[..., 1]))


def signed_areas_from_coords(x):
    return _area2(x[:, 0], x[:, 1], x[:, 2])


@dataclass(frozen=True)
class Support:
    """Nodal support: the triangles having ``node`` as a vertex."""

    node: int
    triangles: np.ndarray
    diameter: float


def node_support(mesh: Mesh, j: int) -> Support:
    if not 0 <= j < mesh.n_nodes:
        raise ValidationError(f"node index {j} out of range 0..{mesh.n_nodes - 1}")
    tris = mesh.node_triangles()[j]
    verts = np.unique(mesh.triangles[tris].ravel())
    pts = mesh.nodes[verts]
    if len(pts) < 2:
        diam = 0.0
    else:
        diff = pts[:, None, :] - pts[None, :, :]
        diam = float(np.sqrt((diff ** 2).sum(-1)).max())
    return Support(node=j, triangles=tris, diameter=diam)


def boundary_nodes(mesh: Mesh) -> np.ndarray:
    """Sorted indices of nodes on edges used by exactly one triangle."""
    edges, counts = mesh.edges()
    return np.unique(edges[counts == 1].ravel())


def build_structured_mesh(rect, nx: int, ny: int) -> Mesh:
    """Uniform ``nx`` by ``ny`` grid on ``rect = (ax, bx, ay, by)``, two triangles per cell."""
    ax, bx, ay, by = (float(v) for v in rect)
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise ValidationError(f"cell counts must be positive integers, got nx={nx}, ny={ny}")
    if not (ax < bx and ay < by):
        raise ValidationError(f"degenerate rectangle {rect}")
    nx, ny = int(nx), int(ny)
    xs = np.linspace(ax, bx, nx + 1)
    ys = np.linspace(ay, by, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    i, jj = np.meshgrid(np.arange(nx), np.arange(ny))
    i, jj = i.ravel(), jj.ravel()
    p00 = jj * (nx + 1) + i
    p10 = p00 + 1
    p01 = p00 + nx + 1
    p11 = p01 + 1
    lower = np.column_stack([p00, p10, p11])
    upper = np.column_stack([p00, p11, p01])
    tris = np.empty((2 * nx * ny, 3), dtype=np.int64)
    tris[0::2] = lower
    tris[1::2] = upper
    return Mesh(nodes, tris, (ax, bx, ay, by))


def refine_uniform(mesh: Mesh):
    """Red refinement.

    Returns
    -------
    fine : Mesh
        Each triangle split into four congruent children through its edge
        midpoints.  Coarse nodes keep their indices; midpoints follow in
        order of first appearance (triangle order, local edges 01, 12, 20).
    P : scipy.sparse.csr_matrix, shape (fine nodes, coarse nodes)
        Nodal interpolation of coarse P1 functions onto the fine mesh.
    """
    n = mesh.n_nodes
    midpoint = {}
    new_nodes = []
    rows, cols, vals = list(range(n)), list(range(n)), [1.0] * n
    children = []
    for a, b, c in mesh.triangles.tolist():
        mids = []
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            m = midpoint.get(key)
            if m is None:
                m = n + len(new_nodes)
                midpoint[key] = m
                new_nodes.append(0.5 * (mesh.nodes[u] + mesh.nodes[v]))
                rows += [m, m]
                cols += [key[0], key[1]]
                vals += [0.5, 0.5]
            mids.append(m)
        mab, mbc, mca = mids
        children += [(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)]
    nodes = np.vstack([mesh.nodes, np.array(new_nodes).reshape(-1, 2)])
    fine = Mesh(nodes, np.array(children, dtype=np.int64), mesh.domain)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(fine.n_nodes, n))
    return fine, P


@dataclass(frozen=True)
class MeshHierarchy:
    """Nested meshes obtained by repeated red refinement.

    ``prolongations[l]`` maps level ``l`` coefficients to level ``l + 1``.
    """

    levels: tuple
    prolongations: tuple

    @classmethod
    def from_mesh(cls, coarse: Mesh, n_levels: int) -> "MeshHierarchy":
        if n_levels < 1:
            raise ValidationError("a hierarchy needs at least one level")
        levels, prolongations = [coarse], []
        for _ in range(n_levels - 1):
            fine, P = refine_uniform(levels[-1])
            levels.append(fine)
            prolongations.append(P)
        return cls(tuple(levels), tuple(prolongations))

    def __len__(self):
        return len(self.levels)

    def prolongation_to_finest(self, level: int):
        """Accumulated interpolation from ``level`` to the finest level."""
        n = self.levels[level].n_nodes
        P = sp.identity(n, format="csr")
        for Q in self.prolongations[level:]:
            P = (Q @ P).tocsr()
        return P


def write_mesh(path, mesh: Mesh) -> None:
    """Write ``{"nodes": [[x, y], ...], "triangles": [[i, j, k], ...]}`` as UTF-8 JSON."""
    doc = {"nodes": mesh.nodes.tolist(), "triangles": mesh.triangles.tolist()}
    Path(path).write_text(json.dumps(doc) + "\n", encoding="utf-8")


def read_mesh(path) -> Mesh:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed mesh JSON: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc or "triangles" not in doc:
        raise ValidationError(f"{path}: expected an object with 'nodes' and 'triangles'")
    try:
        nodes = np.array(doc["nodes"], dtype=float).reshape(-1, 2)
        raw = np.array(doc["triangles"])
        if raw.size and not np.all(np.equal(np.mod(raw, 1), 0)):
            raise ValidationError(f"{path}: triangle indices must be integers")
        tris = raw.astype(np.int64).reshape(-1, 3)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"{path}: malformed mesh arrays: {exc}") from exc
    try:
        return Mesh(nodes, tris)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
