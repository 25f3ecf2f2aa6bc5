"""Eigenvalue localization by nodal supports.

Every node ``j`` gets the interval of ``k / g`` over its support ``T_j``.
The eigenvalues of ``B^{-1} A`` can be matched one-to-one with these
intervals; :func:`find_matching` builds that matching with Hopcroft-Karp
or returns a set violating Hall's condition.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .assembly import AssembledPencil
from .coeff import AnalyticField, Interval, RatioField, hessian_norm, ratio_range, sample_points
from .errors import ValidationError
from .expr import evaluate
from .mesh import node_support

__all__ = [
    "NodeInterval",
    "MatchingResult",
    "PairingReport",
    "node_intervals",
    "hopcroft_karp",
    "find_matching",
    "nodal_pairing_report",
    "taylor_bound",
    "node_taylor_bound",
]


@dataclass(frozen=True)
class NodeInterval:
    node: int
    point: tuple
    r_nodal: float
    interval: Interval
    support: np.ndarray = field(repr=False, default=None)
    gap: float = 0.0

    @property
    def lo(self):
        return self.interval.lo

    @property
    def hi(self):
        return self.interval.hi

    @property
    def width(self):
        return self.interval.hi - self.interval.lo


def node_intervals(pencil: AssembledPencil, ratio: RatioField = None, mode="consistent", s=8):
    """Ratio intervals over the support of every unknown of ``pencil``.

    Parameters
    ----------
    mode : {"consistent", "sampled"}
        ``"consistent"`` uses the per-triangle effective ratios the pencil
        was assembled with (exact for that pencil).  ``"sampled"`` samples
        the analytic ratio at depth ``s`` over each support.
    """
    mesh = pencil.mesh
    if ratio is not None and not ratio.analytic:
        for f in (ratio.k, ratio.g):
            if f.mesh is not mesh:
                raise ValidationError("ratio fields are bound to a different mesh")
    rbar = pencil.ratio_avg
    out = []
    for j in pencil.dofs.tolist():
        sup = node_support(mesh, j)
        p = mesh.nodes[j]
        if ratio is not None and ratio.analytic:
            r_nodal = float(ratio(p[0], p[1]))
        elif ratio is not None:
            r_nodal = float(ratio.per_triangle(mesh)[sup.triangles[0]])
        else:
            r_nodal = float(rbar[sup.triangles[0]])
        gap = 0.0
        if mode == "consistent":
            vals = rbar[sup.triangles]
            iv = Interval(float(vals.min()), float(vals.max()), certified=True)
        elif mode == "sampled":
            if ratio is None:
                raise ValidationError("sampled intervals need a ratio field")
            iv = ratio_range(ratio, mesh, sup.triangles, s)
            if not iv.certified:
                coarse = ratio_range(ratio, mesh, sup.triangles, max(s // 2, 2))
                gap = max(iv.width - coarse.width, 0.0)
        else:
            raise ValidationError(f"unknown interval mode {mode!r}")
        out.append(NodeInterval(j, (float(p[0]), float(p[1])), r_nodal, iv, sup.triangles, gap))
    return out


def hopcroft_karp(adj, n_right):
    """Maximum matching of a bipartite graph.

    ``adj[u]`` lists the right vertices adjacent to left vertex ``u``.
    Returns ``(match_left, match_right)`` with ``-1`` for free vertices.
    """
    n_left = len(adj)
    match_l = np.full(n_left, -1, dtype=np.int64)
    match_r = np.full(n_right, -1, dtype=np.int64)
    inf = n_left + n_right + 1
    while True:
        # layered BFS from all free left vertices
        dist = np.full(n_left, inf, dtype=np.int64)
        q = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                q.append(u)
        found = inf
        while q:
            u = q.popleft()
            if dist[u] >= found:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    found = min(found, dist[u] + 1)
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    q.append(w)
        if found == inf:
            return match_l, match_r
        # vertex-disjoint shortest augmenting paths, iterative DFS
        ptr = [0] * n_left
        for root in range(n_left):
            if match_l[root] >= 0:
                continue
            stack = [root]
            path_r = []
            while stack:
                u = stack[-1]
                advanced = False
                while ptr[u] < len(adj[u]):
                    v = adj[u][ptr[u]]
                    ptr[u] += 1
                    w = match_r[v]
                    if w < 0 and dist[u] + 1 == found:
                        path_r.append(v)
                        for uu, vv in zip(stack, path_r):
                            match_l[uu] = vv
                            match_r[vv] = uu
                        stack = []
                        advanced = True
                        break
                    if w >= 0 and dist[w] == dist[u] + 1:
                        path_r.append(v)
                        stack.append(w)
                        advanced = True
                        break
                if not stack:
                    break
                if not advanced:
                    dist[u] = inf
                    stack.pop()
                    if path_r:
                        path_r.pop()


@dataclass
class MatchingResult:
    """Outcome of :func:`find_matching`.

    ``perm[j]`` is the eigenvalue index matched to interval ``j`` (``-1`` if
    unmatched).  When deficient, ``witness_nodes`` / ``witness_eigs`` hold
    a Hall violator and ``count_in_union`` the eigenvalues lying in the
    union of the witness intervals.
    """

    status: str
    perm: np.ndarray
    size: int
    tol: float
    side: str = "nodes"
    witness_nodes: list = None
    witness_eigs: list = None
    count_in_union: int = None

    @property
    def perfect(self) -> bool:
        return self.status == "perfect"

    @property
    def deficiency(self) -> int:
        if self.perfect:
            return 0
        if self.side == "nodes":
            return len(self.witness_nodes) - self.count_in_union
        return len(self.witness_eigs) - len(self.witness_nodes)


def _values(eigs):
    return np.asarray(getattr(eigs, "values", eigs), dtype=float)


def _adjacency(lam, intervals, tol):
    order = np.argsort(lam, kind="stable")
    srt = lam[order]
    adj = []
    for iv in intervals:
        a = np.searchsorted(srt, iv.lo - tol, side="left")
        b = np.searchsorted(srt, iv.hi + tol, side="right")
        adj.append(sorted(order[a:b].tolist()))
    return adj


def find_matching(eigs, intervals, tol=None) -> MatchingResult:
    """Match eigenvalues to node intervals containing them.

    With as many eigenvalues as intervals every interval must be matched.
    With fewer eigenvalues (deflated Neumann pencils) every eigenvalue must
    be matched.  ``tol`` defaults to ``1e-9`` times the spectral radius,
    widened to the sampling gap of uncertified intervals.
    """
    lam = _values(eigs)
    m, n = len(lam), len(intervals)
    if m > n:
        raise ValidationError(f"{m} eigenvalues but only {n} intervals")
    if tol is None:
        tol = 1e-9 * (np.abs(lam).max() if m else 1.0)
        gaps = [iv.gap for iv in intervals if not iv.interval.certified]
        if gaps:
            tol = max(tol, max(gaps))
    if not tol >= 0.0:
        raise ValidationError(f"matching tolerance must be nonnegative, got {tol}")
    adj = _adjacency(lam, intervals, tol)
    match_l, match_r = hopcroft_karp(adj, m)
    size = int((match_l >= 0).sum())
    side = "nodes" if m == n else "eigenvalues"
    if size == m:
        return MatchingResult("perfect", match_l, size, tol, side)

    if side == "nodes":
        root = int(np.flatnonzero(match_l < 0)[0])
        J, N = _alternating_reach(root, adj, match_r)
        union = np.zeros(m, dtype=bool)
        for j in J:
            union[adj[j]] = True
        return MatchingResult("deficient", match_l, size, tol, side,
                              witness_nodes=[intervals[j].node for j in J],
                              witness_eigs=N, count_in_union=int(union.sum()))

    radj = [[] for _ in range(m)]
    for u, vs in enumerate(adj):
        for v in vs:
            radj[v].append(u)
    root = int(np.flatnonzero(match_r < 0)[0])
    S, Nodes = _alternating_reach(root, radj, match_l)
    return MatchingResult("deficient", match_l, size, tol, side,
                          witness_nodes=[intervals[j].node for j in Nodes],
                          witness_eigs=S, count_in_union=len(S))


def _alternating_reach(root, adj, match_other):
    """Vertices reachable from a free ``root`` along alternating paths."""
    seen_l, seen_r = {root}, set()
    q = deque([root])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v in seen_r:
                continue
            seen_r.add(v)
            w = int(match_other[v])
            if w >= 0 and w not in seen_l:
                seen_l.add(w)
                q.append(w)
    return sorted(seen_l), sorted(seen_r)


@dataclass
class PairingReport:
    eigenvalues: np.ndarray
    nodal_values: np.ndarray
    differences: np.ndarray
    max_difference: float
    bound: float
    max_width: float
    nodes: np.ndarray

    @property
    def within_bound(self) -> bool:
        return self.max_difference <= self.bound * (1 + 1e-12) + 1e-12


def nodal_pairing_report(eigs, intervals, matching: MatchingResult = None) -> PairingReport:
    """Sort eigenvalues and nodal ratio values and compare them pairwise.

    When there are fewer eigenvalues than intervals the unmatched nodes of a
    perfect matching are left out.  ``bound`` is the largest
    ``max(hi, r) - min(lo, r)`` over the used nodes, which caps every
    matched ``|lambda - r(x_j)|`` and hence the sorted differences.
    """
    lam = _values(eigs)
    m, n = len(lam), len(intervals)
    if m > n:
        raise ValidationError(f"{m} eigenvalues but only {n} nodal values")
    used = list(range(n))
    if m < n:
        if matching is None:
            matching = find_matching(lam, intervals)
        if not matching.perfect:
            raise ValidationError("pairing needs a perfect matching; none exists")
        used = np.flatnonzero(matching.perm >= 0).tolist()
    ivs = [intervals[j] for j in used]
    r = np.sort(np.array([iv.r_nodal for iv in ivs]))
    lam_s = np.sort(lam)
    d = lam_s - r
    caps = [max(iv.hi, iv.r_nodal) - min(iv.lo, iv.r_nodal) for iv in ivs]
    return PairingReport(lam_s, r, d, float(np.abs(d).max()) if m else 0.0,
                         float(max(caps)) if caps else 0.0,
                         float(max(iv.width for iv in ivs)) if ivs else 0.0,
                         np.array([iv.node for iv in ivs]))


def taylor_bound(ratio, point, h, hessian_points=None) -> float:
    """``h |grad r(point)| + h^2/2 max |D^2 r|`` over ``hessian_points``.

    ``hessian_points`` defaults to ``point`` alone.
    """
    if isinstance(ratio, RatioField):
        if not ratio.analytic:
            raise ValidationError("Taylor bound is unsupported for non-analytic ratios")
        f = ratio.field
    elif isinstance(ratio, AnalyticField):
        f = ratio
    else:
        raise ValidationError("Taylor bound is unsupported for non-analytic ratios")
    x, y = float(point[0]), float(point[1])
    gx, gy = (float(evaluate(d, x, y)) for d in f.gradient)
    pts = np.array([point] if hessian_points is None else hessian_points, dtype=float).reshape(-1, 2)
    hmax = float(hessian_norm(f, pts[:, 0], pts[:, 1]).max())
    return h * float(np.hypot(gx, gy)) + 0.5 * h * h * hmax


def node_taylor_bound(ratio, mesh, j, s=8) -> float:
    """Taylor bound at node ``j`` with ``h = diam(T_j)`` and the Hessian sampled over ``T_j``."""
    sup = node_support(mesh, j)
    pts = sample_points(mesh, sup.triangles, s).reshape(-1, 2)
    return taylor_bound(ratio, mesh.nodes[j], sup.diameter, pts)
