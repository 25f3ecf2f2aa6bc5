"""Coefficient fields k, g and their ratio r = k / g.

A field is either analytic (an expression in x, y) or constant on each
triangle of a particular mesh.  Ranges of analytic ratios are estimated by
structured sampling and flagged as uncertified; ranges of per-triangle
constant ratios are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError
from .expr import Expr, diff, evaluate, parse_expression
from .mesh import Mesh

__all__ = [
    "AnalyticField",
    "PerTriangleConstant",
    "RatioField",
    "Interval",
    "as_field",
    "evaluate_field",
    "ratio_range",
    "sample_points",
    "hessian_norm",
]


@dataclass(frozen=True)
class AnalyticField:
    expr: Expr

    @classmethod
    def parse(cls, text: str) -> "AnalyticField":
        return cls(parse_expression(text))

    def __call__(self, x, y):
        return evaluate(self.expr, x, y)

    @cached_property
    def gradient(self):
        return diff(self.expr, "x"), diff(self.expr, "y")

    @cached_property
    def hessian(self):
        dx, dy = self.gradient
        return diff(dx, "x"), diff(dx, "y"), diff(dy, "y")


@dataclass(frozen=True, eq=False)
class PerTriangleConstant:
    """One value per triangle of ``mesh``."""

    values: np.ndarray
    mesh: Mesh

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if len(v) != self.mesh.n_triangles:
            raise ValidationError(
                f"{len(v)} values given for a mesh with {self.mesh.n_triangles} triangles")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def at(self, triangles):
        return self.values[np.asarray(triangles)]


def as_field(f):
    """Coerce text, expressions and numbers to fields."""
    if isinstance(f, (AnalyticField, PerTriangleConstant)):
        return f
    if isinstance(f, Expr):
        return AnalyticField(f)
    if isinstance(f, str):
        return AnalyticField.parse(f)
    if isinstance(f, (int, float)):
        return AnalyticField.parse(repr(float(f)))
    raise TypeError(f"cannot interpret {f!r} as a coefficient field")


def evaluate_field(field, p, triangle=None):
    """Value of ``field`` at point ``p``.

    Per-triangle constant fields use ``triangle`` when given, otherwise the
    point is located in the mesh.
    """
    if isinstance(field, AnalyticField):
        return float(field(p[0], p[1]))
    if triangle is None:
        triangle = field.mesh.locate(p)
        if triangle is None:
            raise ValidationError(f"point {tuple(p)} lies outside the mesh")
    return float(field.values[triangle])


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    certified: bool = False

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValidationError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)

    def contains(self, v, tol=0.0):
        return self.lo - tol <= v <= self.hi + tol

    def __contains__(self, v):
        return self.contains(v)


@dataclass(frozen=True)
class RatioField:
    k: object
    g: object

    def __post_init__(self):
        object.__setattr__(self, "k", as_field(self.k))
        object.__setattr__(self, "g", as_field(self.g))

    @property
    def analytic(self) -> bool:
        return isinstance(self.k, AnalyticField) and isinstance(self.g, AnalyticField)

    def __call__(self, x, y):
        if not self.analytic:
            raise ValidationError("pointwise ratio needs analytic k and g")
        return self.k(x, y) / self.g(x, y)

    @cached_property
    def expr(self) -> Expr:
        if not self.analytic:
            raise ValidationError("symbolic ratio needs analytic k and g")
        return self.k.expr / self.g.expr

    @cached_property
    def field(self) -> AnalyticField:
        return AnalyticField(self.expr)

    def per_triangle(self, mesh: Mesh) -> np.ndarray:
        if isinstance(self.k, PerTriangleConstant) and isinstance(self.g, PerTriangleConstant):
            if self.k.mesh is not mesh or self.g.mesh is not mesh:
                raise ValidationError("per-triangle fields are bound to a different mesh")
            return self.k.values / self.g.values
        raise ValidationError("per-triangle ratio needs per-triangle constant k and g")


def _lattice(s):
    """Barycentric coordinates of the order-``s`` lattice plus the centroid."""
    s = max(int(s), 2)
    pts = [(i / s, j / s) for i in range(s + 1) for j in range(s + 1 - i)]
    lam = np.array(pts)
    lam = np.column_stack([lam, 1.0 - lam.sum(1)])
    lam = np.vstack([lam, [1 / 3, 1 / 3, 1 / 3]])
    return lam


def sample_points(mesh: Mesh, triangles, s: int):
    """Sample points of each listed triangle, shape ``(len(triangles), m, 2)``.

    The lattice has order ``max(s, 2)`` so vertices and edge midpoints are
    always included, and the centroid is appended.
    """
    lam = _lattice(2 * math.ceil(s / 2))
    x = mesh.nodes[mesh.triangles[np.asarray(triangles)]]  # (t, 3, 2)
    return np.einsum("mk,tkd->tmd", lam, x)


def ratio_range(ratio: RatioField, mesh: Mesh, region=None, s: int = 8) -> Interval:
    """Range of ``k / g`` over the triangles ``region`` (all triangles when ``None``)."""
    if region is None:
        tris = np.arange(mesh.n_triangles)
    else:
        tris = np.unique(np.asarray(region, dtype=np.int64).ravel())
    if tris.size == 0:
        raise ValidationError("ratio_range over an empty region")
    if not ratio.analytic:
        vals = ratio.per_triangle(mesh)[tris]
        return Interval(float(vals.min()), float(vals.max()), certified=True)
    pts = sample_points(mesh, tris, s)
    vals = ratio(pts[..., 0], pts[..., 1])
    return Interval(float(vals.min()), float(vals.max()), certified=False)


def hessian_norm(field: AnalyticField, x, y):
    """Spectral norm of the 2x2 Hessian, elementwise over points."""
    hxx, hxy, hyy = (evaluate(h, x, y) for h in field.hessian)
    half_tr = 0.5 * (hxx + hyy)
    rad = np.hypot(0.5 * (hxx - hyy), hxy)
    return np.abs(half_tr) + rad
