"""Problem configurations: domain, mesh resolution, coefficients, boundary condition."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .assembly import QuadratureRule, assemble_pencil
from .coeff import AnalyticField, RatioField
from .errors import ValidationError
from .mesh import Mesh, build_structured_mesh

__all__ = ["ProblemConfig", "BUMP_K", "BUMP_G", "BUMP_R", "bump_problem"]

BUMP_G = "1+50*exp(-5*(x^2+y^2))"
BUMP_K = f"({BUMP_G})*(2+sin(x+y))"
BUMP_R = "2+sin(x+y)"


@dataclass(frozen=True)
class ProblemConfig:
    rect: tuple = (-1.0, 1.0, -1.0, 1.0)
    nx: int = 16
    ny: int = 16
    k: str = BUMP_K
    g: str = BUMP_G
    bc: str = "neumann"
    quadrature: str = "midpoint3"

    def __post_init__(self):
        rect = tuple(float(v) for v in self.rect)
        if len(rect) != 4:
            raise ValidationError(f"rect must have four entries, got {self.rect!r}")
        object.__setattr__(self, "rect", rect)
        if self.bc not in ("dirichlet", "neumann"):
            raise ValidationError(f"bc must be 'dirichlet' or 'neumann', got {self.bc!r}")
        QuadratureRule.coerce(self.quadrature)
        # parse eagerly so bad expressions fail at configuration time
        self.k_field
        self.g_field

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known - {"domain"}
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        if "domain" in d:
            d["rect"] = d.pop("domain")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ProblemConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read config {path}: {exc.strerror}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: malformed JSON: {exc}") from exc

    def to_dict(self):
        d = asdict(self)
        d["rect"] = list(self.rect)
        return d

    def with_overrides(self, **kw) -> "ProblemConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    @property
    def k_field(self):
        return AnalyticField.parse(self.k)

    @property
    def g_field(self):
        return AnalyticField.parse(self.g)

    @property
    def ratio(self) -> RatioField:
        return RatioField(self.k_field, self.g_field)

    def mesh(self) -> Mesh:
        return build_structured_mesh(self.rect, self.nx, self.ny)

    def assemble(self, mesh: Mesh = None):
        mesh = self.mesh() if mesh is None else mesh
        return assemble_pencil(mesh, self.k_field, self.g_field, self.bc, self.quadrature)


def bump_problem(nx=16, ny=None, bc="neumann", quadrature="midpoint3") -> ProblemConfig:
    """Square ``(-1, 1)^2`` with ``r = 2 + sin(x + y)`` modulated by a Gaussian bump in g."""
    return ProblemConfig((-1.0, 1.0, -1.0, 1.0), nx, nx if ny is None else ny,
                         BUMP_K, BUMP_G, bc, quadrature)
