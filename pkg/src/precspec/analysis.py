"""Convergence and perturbation experiments on assembled pencils.

Continuous objects (the operator ``Z = B^{-1} A``, a function ``w`` and the
B-orthogonal projections) are represented on the finest level of a nested
mesh hierarchy.  Coarse matrices are Galerkin projections ``P^T M P`` of the
finest ones, so the coarse spaces nest exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import AssembledPencil
from .coeff import Interval, ratio_range
from .eigensolve import generalized_eigs, make_pencil
from .errors import ValidationError
from .expr import Expr, evaluate, parse_expression
from .localization import node_intervals
from .mesh import MeshHierarchy, boundary_nodes, node_support
from .problem import ProblemConfig

__all__ = [
    "fill_distance",
    "solve_eigs",
    "RefinementLevel",
    "RefinementReport",
    "refinement_study",
    "PerturbationReport",
    "perturbation_experiment",
    "WeylRow",
    "WeylReport",
    "weyl_sequence_demo",
    "ConvergenceLevel",
    "ConvergenceReport",
    "convergence_study",
    "cea_check",
    "pointwise_convergence_study",
]


def solve_eigs(pencil: AssembledPencil, want_vectors=False):
    """Spectrum of an assembled pencil, deflating constants for Neumann problems."""
    return generalized_eigs(make_pencil(pencil.A, pencil.B, deflate=pencil.deflate), want_vectors)


def fill_distance(interval, eigs, m: int = 2001) -> float:
    """Largest distance from a point of ``interval`` (sampled at ``m`` points) to the spectrum."""
    a, b = (interval.lo, interval.hi) if isinstance(interval, Interval) else interval
    lam = np.sort(np.asarray(getattr(eigs, "values", eigs), dtype=float))
    if lam.size == 0:
        raise ValidationError("fill distance of an empty spectrum")
    if not a <= b or m < 2:
        raise ValidationError("fill distance needs a <= b and m >= 2")
    s = np.linspace(a, b, m)
    i = np.clip(np.searchsorted(lam, s), 1, max(len(lam) - 1, 1))
    left = np.abs(s - lam[i - 1])
    right = np.abs(s - lam[np.minimum(i, len(lam) - 1)])
    return float(np.minimum(left, right).max())


# --------------------------------------------------------------------------
# refinement

@dataclass
class RefinementLevel:
    level: int
    n_dofs: int
    h_max: float
    lambda_min: float
    lambda_max: float
    fill_distance: float
    max_width: float
    fill_consistent: float = field(default=None, repr=False)
    consistent_interval: Interval = field(default=None, repr=False)


@dataclass
class RefinementReport:
    target: Interval
    levels: list

    def fill_ratios(self):
        f = [lv.fill_distance for lv in self.levels]
        return [b / a if a > 0 else 0.0 for a, b in zip(f, f[1:])]

    def width_ratios(self):
        w = [lv.max_width for lv in self.levels]
        return [b / a if a > 0 else 0.0 for a, b in zip(w, w[1:])]

    def fill_monotone(self, slack=0.9) -> bool:
        f = [lv.fill_distance for lv in self.levels]
        return all(b <= slack * a or a == 0.0 for a, b in zip(f, f[1:]))


def refinement_study(config: ProblemConfig, levels: int = 3, m: int = 2001,
                     target=None, s: int = 8) -> RefinementReport:
    """Spectra on successive red refinements of ``config``'s mesh.

    ``target`` defaults to the sampled range of ``k / g`` over the finest mesh.
    """
    if levels < 2:
        raise ValidationError("a refinement study needs at least two levels")
    hier = MeshHierarchy.from_mesh(config.mesh(), levels)
    if target is None:
        target = ratio_range(config.ratio, hier.levels[-1], None, s)
    elif not isinstance(target, Interval):
        target = Interval(float(target[0]), float(target[1]))
    rows = []
    for l, mesh in enumerate(hier.levels):
        pencil = config.assemble(mesh)
        eigs = solve_eigs(pencil)
        ivs = node_intervals(pencil, mode="consistent")
        covered = np.unique(np.concatenate([iv.support for iv in ivs]))
        rbar = pencil.ratio_avg[covered]
        consistent = Interval(float(rbar.min()), float(rbar.max()), True)
        rows.append(RefinementLevel(
            level=l, n_dofs=len(eigs), h_max=mesh.max_support_diameter(),
            lambda_min=float(eigs.values[0]), lambda_max=float(eigs.values[-1]),
            fill_distance=fill_distance(target, eigs, m),
            max_width=max(iv.width for iv in ivs),
            fill_consistent=fill_distance(consistent, eigs, m),
            consistent_interval=consistent))
    return RefinementReport(target, rows)


# --------------------------------------------------------------------------
# local perturbation

@dataclass
class PerturbationReport:
    nodes: list
    K: float
    multiplicity: int
    expected: int
    theta_min: float
    theta_max: float
    Theta: float
    bound: float
    count: int
    lemma_interval: Interval
    column_residual: float

    @property
    def ok(self) -> bool:
        scale = max(abs(self.K), 1.0)
        return (self.multiplicity >= self.expected
                and self.Theta <= self.bound + 1e-10 * scale
                and self.count >= self.expected)


def _union_support(mesh, nodes):
    return np.unique(np.concatenate([node_support(mesh, j).triangles for j in nodes]))


def perturbation_experiment(problem, nodes, K=None, cluster_tol=1e-9) -> PerturbationReport:
    """Replace k by ``K g`` on the supports of ``nodes`` and compare spectra.

    ``problem`` is a :class:`ProblemConfig` or an :class:`AssembledPencil`;
    ``K=None`` picks the midpoint of the effective ratio range over the
    union of the supports.
    """
    pencil = problem.assemble() if isinstance(problem, ProblemConfig) else problem
    J = sorted(set(int(j) for j in nodes))
    if not J:
        raise ValidationError("perturbation needs a nonempty node set")
    pos = {int(d): i for i, d in enumerate(pencil.dofs.tolist())}
    missing = [j for j in J if j not in pos]
    if missing:
        raise ValidationError(f"nodes {missing} are not unknowns of this pencil")
    tris = _union_support(pencil.mesh, J)
    rbar = pencil.ratio_avg[tris]
    lo, hi = float(rbar.min()), float(rbar.max())
    if K is None:
        K = 0.5 * (lo + hi)
    K = float(K)
    if not K > 0.0:
        raise ValidationError(f"K must be positive, got {K}")

    k_pert = pencil.k_avg.copy()
    k_pert[tris] = K * pencil.g_avg[tris]
    pert = pencil.with_k_averages(k_pert)

    cols = [pos[j] for j in J]
    diff = pert.A[:, cols] - K * pencil.B[:, cols]
    col_res = float(abs(diff).max()) if diff.nnz else 0.0
    col_res /= max(float(abs(pencil.B).max()) * K, 1e-300)

    deflate = pencil.deflate
    lam_pert = solve_eigs(pert).values
    multiplicity = int((np.abs(lam_pert - K) <= cluster_tol * K).sum())
    theta = generalized_eigs(make_pencil(pencil.A - pert.A, pencil.B, deflate)).values
    tmin, tmax = float(theta[0]), float(theta[-1])
    Theta = max(abs(tmin), abs(tmax))
    bound = float(np.abs(rbar - K).max())
    lam = solve_eigs(pencil).values
    slack = cluster_tol * max(K, 1.0)
    count = int(((lam >= K - bound - slack) & (lam <= K + bound + slack)).sum())
    # with deflation the |J| vectors e_j lose one dimension only if J is everything
    expected = len(J) if not (deflate and len(J) == pencil.n) else len(J) - 1
    return PerturbationReport(J, K, multiplicity, expected, tmin, tmax, Theta, bound, count,
                              Interval(K - bound, K + bound), col_res)


# --------------------------------------------------------------------------
# Weyl sequences

@dataclass
class WeylRow:
    radius: float
    n_nodes: int
    norm_u: float
    bound: float


@dataclass
class WeylReport:
    center: tuple
    lambda0: float
    rows: list

    @property
    def norms(self):
        return [r.norm_u for r in self.rows]


def _solve_compatible(M, rhs, singular):
    """Solve ``M u = rhs``; for singular (Neumann) ``M`` the first unknown is fixed to zero."""
    M = sp.csc_matrix(M)
    if not singular:
        return spla.splu(M).solve(rhs)
    u = np.zeros_like(rhs)
    u[1:] = spla.splu(M[1:, 1:].tocsc()).solve(rhs[1:])
    return u


def _disc_samples(center, r, n_r=64, n_t=256):
    rr = np.linspace(0.0, r, n_r + 1)[:, None]
    tt = np.linspace(0.0, 2 * np.pi, n_t, endpoint=False)[None, :]
    return center[0] + (rr * np.cos(tt)).ravel(), center[1] + (rr * np.sin(tt)).ravel()


def weyl_sequence_demo(config: ProblemConfig, x0=(0.0, 0.0), radii=(0.5, 0.25, 0.125),
                       lambda0=None, mesh=None) -> WeylReport:
    """Residual norms ``|(lambda0 I - B^{-1} A) v_r|_B`` of B-normalized bumps.

    ``v_r`` is the sum of the hat functions whose whole support lies in the
    closed disc of radius ``r`` around ``x0``.  ``bound`` is
    ``sup |g lambda0 - k| / min g`` over the disc, sampled on a polar grid.
    """
    mesh = config.mesh() if mesh is None else mesh
    pencil = config.assemble(mesh)
    ratio = config.ratio
    x0 = (float(x0[0]), float(x0[1]))
    lam0 = float(ratio(*x0)) if lambda0 is None else float(lambda0)
    ax, bx, ay, by = mesh.domain
    dofs = pencil.dofs
    dist = np.hypot(mesh.nodes[:, 0] - x0[0], mesh.nodes[:, 1] - x0[1])
    rows = []
    for r in radii:
        r = float(r)
        if not (ax <= x0[0] - r and x0[0] + r <= bx and ay <= x0[1] - r and x0[1] + r <= by):
            raise ValidationError(f"disc of radius {r} around {x0} leaves the domain")
        inside = []
        for i, j in enumerate(dofs.tolist()):
            if dist[j] > r:
                continue
            verts = np.unique(mesh.triangles[node_support(mesh, j).triangles])
            if np.all(dist[verts] <= r * (1 + 1e-12)):
                inside.append(i)
        if not inside:
            raise ValidationError(
                f"radius {r}: no hat function has its support inside the disc; refine the mesh")
        v = np.zeros(pencil.n)
        v[inside] = 1.0
        v /= np.sqrt(v @ (pencil.B @ v))
        rhs = lam0 * (pencil.B @ v) - pencil.A @ v
        u = _solve_compatible(pencil.B, rhs, pencil.deflate)
        norm_u = float(np.sqrt(max(u @ rhs, 0.0)))
        xs, ys = _disc_samples(x0, r)
        gv = config.g_field(xs, ys)
        kv = config.k_field(xs, ys)
        bound = float(np.abs(gv * lam0 - kv).max() / gv.min())
        rows.append(WeylRow(r, len(inside), norm_u, bound))
    return WeylReport(x0, lam0, rows)


# --------------------------------------------------------------------------
# Galerkin convergence

@dataclass
class ConvergenceLevel:
    level: int
    n_dofs: int
    err_galerkin: float
    err_best: float
    quasi_optimality: float
    pointwise_error: float


@dataclass
class ConvergenceReport:
    kappa: float
    levels: list

    @property
    def ratios(self):
        return [lv.quasi_optimality for lv in self.levels]

    @property
    def pointwise(self):
        return [lv.pointwise_error for lv in self.levels]


def _bnorm(B, x, singular=False):
    # B only annihilates constants up to roundoff; drop the mean so the
    # square root does not amplify that residue for Neumann seminorms
    if singular:
        x = x - x.mean()
    return float(np.sqrt(max(x @ (B @ x), 0.0)))


def _abs_scale(M, x):
    x = np.abs(x)
    return float(np.sqrt(x @ (abs(M) @ x)))


def _snap(err, scale, rel=1e-12):
    """Errors at roundoff level relative to ``scale`` are reported as exact zeros."""
    return 0.0 if err <= rel * scale else err


def _as_expr(w):
    if isinstance(w, Expr):
        return w
    if isinstance(w, str):
        return parse_expression(w)
    raise TypeError(f"cannot interpret {w!r} as a function of x, y")


def convergence_study(config: ProblemConfig, w, levels: int = 4) -> ConvergenceReport:
    """Galerkin error, best approximation and ``|Z w - Z_n w|_B`` per coarse level.

    The finest of ``levels`` nested meshes is the reference; rows are
    reported for the coarser ones.
    """
    if levels < 2:
        raise ValidationError("convergence study needs at least two levels")
    w = _as_expr(w)
    hier = MeshHierarchy.from_mesh(config.mesh(), levels)
    fine = config.assemble(hier.levels[-1])
    A_f, B_f = fine.A.tocsc(), fine.B.tocsc()
    singular = fine.deflate
    mesh_f = hier.levels[-1]
    wf = evaluate(w, mesh_f.nodes[fine.dofs, 0], mesh_f.nodes[fine.dofs, 1])
    z_f = _solve_compatible(B_f, A_f @ wf, singular)
    covered = fine.ratio_avg
    kappa = float(covered.max() / covered.min())

    # magnitude scales |x|^T |M| |x| bound the roundoff of the quadratic forms
    w_norm = _abs_scale(B_f, wf)
    z_norm = _abs_scale(A_f, wf)
    rows = []
    for l in range(levels - 1):
        P = hier.prolongation_to_finest(l)
        if config.bc == "dirichlet":
            P = P[fine.dofs][:, _interior(hier.levels[l])]
        P = sp.csc_matrix(P)
        A_c = (P.T @ A_f @ P).tocsc()
        B_c = (P.T @ B_f @ P).tocsc()
        # Galerkin solution of Z w = f with f = Z w: A_c c = P^T A w
        c_gal = _solve_compatible(A_c, P.T @ (A_f @ wf), singular)
        c_proj = _solve_compatible(B_c, P.T @ (B_f @ wf), singular)
        err_gal = _bnorm(B_f, wf - P @ c_gal, singular)
        err_best = _bnorm(B_f, wf - P @ c_proj, singular)
        err_gal, err_best = _snap(err_gal, w_norm), _snap(err_best, w_norm)
        ratio = 1.0 if err_best == 0.0 else err_gal / err_best
        z_c = _solve_compatible(B_c, A_c @ c_proj, singular)
        pointwise = _snap(_bnorm(B_f, z_f - P @ z_c, singular), z_norm)
        rows.append(ConvergenceLevel(l, P.shape[1], err_gal, err_best, ratio, pointwise))
    return ConvergenceReport(kappa, rows)


def _interior(mesh):
    return np.setdiff1d(np.arange(mesh.n_nodes), boundary_nodes(mesh))


def cea_check(config: ProblemConfig, w, levels: int = 4) -> ConvergenceReport:
    """Quasi-optimality ``|w - w_n|_B / |w - P_B w|_B`` against ``kappa = max r / min r``."""
    return convergence_study(config, w, levels)


def pointwise_convergence_study(config: ProblemConfig, w, levels: int = 4) -> ConvergenceReport:
    """``|Z w - Z_n w|_B`` over nested levels, ``Z_n = B_n^{-1} A_n P_B^n``."""
    if levels < 3:
        raise ValidationError("pointwise convergence study needs at least three levels")
    return convergence_study(config, w, levels)

