import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_config
from oracles import perfect_matching_exists
from precspec import (BUMP_G, BUMP_K, BUMP_R, Interval, RatioField, ValidationError,
                      assemble_pencil, build_structured_mesh, find_matching, nodal_pairing_report,
                      node_intervals, node_support, node_taylor_bound, bump_problem,
                      solve_eigs, taylor_bound)
from precspec.localization import NodeInterval, hopcroft_karp


def _ivs(pairs):
    return [NodeInterval(j, (0.0, 0.0), 0.5 * (a + b), Interval(a, b, True))
            for j, (a, b) in enumerate(pairs)]


def test_constructed_counterexample():
    res = find_matching(np.array([1.0, 5.0]), _ivs([(0, 2), (0, 2)]), tol=0.0)
    assert not res.perfect
    assert res.witness_nodes == [0, 1]
    assert res.count_in_union == 1
    assert res.deficiency == 1


def test_perfect_matching_is_valid_bijection():
    lam = np.array([0.5, 1.5, 2.5])
    ivs = _ivs([(2, 3), (0, 1), (1, 2)])
    res = find_matching(lam, ivs, tol=0.0)
    assert res.perfect and sorted(res.perm.tolist()) == [0, 1, 2]
    for j, k in enumerate(res.perm):
        assert ivs[j].interval.contains(lam[k])


def test_hopcroft_karp_on_known_graph():
    adj = [[0, 1], [0], [1, 2], [2]]
    ml, mr = hopcroft_karp(adj, 3)
    assert (ml >= 0).sum() == 3
    for u, v in enumerate(ml):
        if v >= 0:
            assert v in adj[u] and mr[v] == u


def _random_instance(rng, m, n):
    lam = np.sort(rng.uniform(0, 10, m))
    lo = rng.uniform(0, 9, n)
    hi = lo + rng.uniform(0, 3, n)
    return lam, list(zip(lo, hi))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.integers(0, 1), st.integers(0, 2**32 - 1))
def test_matching_agrees_with_brute_force(n, short, seed):
    rng = np.random.default_rng(seed)
    m = max(n - short, 1)
    lam, pairs = _random_instance(rng, m, n)
    res = find_matching(lam, _ivs(pairs), tol=0.0)
    assert res.perfect == perfect_matching_exists(lam, pairs, 0.0)
    if res.perfect:
        used = res.perm[res.perm >= 0]
        assert len(set(used.tolist())) == m
        for j, k in enumerate(res.perm):
            if k >= 0:
                assert pairs[j][0] <= lam[k] <= pairs[j][1]
    elif res.side == "nodes":
        # Hall violator: the union of the witness intervals holds fewer eigenvalues
        inside = [any(pairs[j][0] <= v <= pairs[j][1] for j in res.witness_nodes) for v in lam]
        assert sum(inside) == res.count_in_union < len(res.witness_nodes)
    else:
        nbrs = {j for j, (a, b) in enumerate(pairs)
                if any(a <= lam[k] <= b for k in res.witness_eigs)}
        assert nbrs <= set(res.witness_nodes)
        assert len(res.witness_nodes) < len(res.witness_eigs)


def test_too_many_eigenvalues_rejected():
    with pytest.raises(ValidationError):
        find_matching(np.arange(3.0), _ivs([(0, 3), (0, 3)]))


@pytest.mark.parametrize("bc", ["neumann", "dirichlet"])
@pytest.mark.parametrize("rule", ["centroid", "midpoint3"])
def test_assembled_pencils_match_perfectly(bc, rule, rng):
    for _ in range(3):
        cfg = random_config(rng, bc=bc, quadrature=rule)
        p = cfg.assemble()
        lam = solve_eigs(p)
        res = find_matching(lam, node_intervals(p))
        assert res.perfect
        assert res.tol == pytest.approx(1e-9 * np.abs(lam.values).max())
        assert res.side == ("eigenvalues" if bc == "neumann" else "nodes")


def test_bump_intervals_inside_unit_range():
    p = bump_problem(16).assemble()
    for iv in node_intervals(p, RatioField(BUMP_K, BUMP_G)):
        assert 1.0 <= iv.lo <= iv.hi <= 3.0


def test_constant_ratio_intervals_are_degenerate():
    m = build_structured_mesh((-1, 1, -1, 1), 5, 5)
    p = assemble_pencil(m, "2.5*(1+x^2)", "1+x^2", "dirichlet")
    r = RatioField("2.5*(1+x^2)", "1+x^2")
    ivs = node_intervals(p, r)
    assert all(abs(iv.lo - 2.5) <= 1e-14 and abs(iv.hi - 2.5) <= 1e-14 for iv in ivs)
    rep = nodal_pairing_report(solve_eigs(p), ivs)
    assert rep.max_difference <= 1e-12


@pytest.mark.parametrize("rule", ["centroid", "midpoint3"])
def test_sampled_interval_contains_consistent_values(rule):
    m = build_structured_mesh((-1, 1, -1, 1), 6, 6)
    p = assemble_pencil(m, BUMP_K, BUMP_G, "neumann", rule)
    r = RatioField(BUMP_K, BUMP_G)
    cons = node_intervals(p, r, "consistent")
    samp = node_intervals(p, r, "sampled", s=4)
    for c, s in zip(cons, samp):
        assert not s.interval.certified
        assert s.lo <= c.lo * (1 + 1e-14) and c.hi <= s.hi * (1 + 1e-14)
        assert s.interval.contains(c.r_nodal)


def test_sampled_matching_uses_gap_tolerance():
    p = bump_problem(6).assemble()
    ivs = node_intervals(p, RatioField(BUMP_K, BUMP_G), "sampled", s=4)
    res = find_matching(solve_eigs(p), ivs)
    assert res.perfect
    assert res.tol >= max(iv.gap for iv in ivs)


def test_scale_invariance():
    m = build_structured_mesh((-1, 1, -1, 1), 6, 6)
    base = assemble_pencil(m, BUMP_K, BUMP_G, "dirichlet")
    scaled = assemble_pencil(m, f"3.7*({BUMP_K})", f"3.7*({BUMP_G})", "dirichlet")
    np.testing.assert_allclose(scaled.ratio_avg, base.ratio_avg, rtol=1e-12)
    l0, l1 = solve_eigs(base).values, solve_eigs(scaled).values
    np.testing.assert_allclose(l1, l0, rtol=1e-12)
    r0 = find_matching(l0, node_intervals(base))
    r1 = find_matching(l1, node_intervals(scaled))
    assert r0.perfect and r1.perfect


def test_bump_pairing_within_max_width():
    p = bump_problem(16).assemble()
    lam = solve_eigs(p)
    ivs = node_intervals(p, RatioField(BUMP_K, BUMP_G))
    rep = nodal_pairing_report(lam, ivs)
    assert len(rep.eigenvalues) == len(rep.nodal_values) == 288
    assert rep.max_difference <= rep.max_width
    assert rep.within_bound


def test_max_width_halves_under_refinement():
    widths = []
    for n in (8, 16, 32):
        p = bump_problem(n).assemble()
        widths.append(max(iv.width for iv in node_intervals(p)))
    for a, b in zip(widths, widths[1:]):
        assert 0.4 <= b / a <= 0.6


def test_taylor_bounds():
    assert taylor_bound(RatioField("3*(1+x^2)", "1+x^2"), (0.2, 0.1), 0.5) == pytest.approx(0, abs=1e-12)
    assert taylor_bound(RatioField("x", 1.0), (0.3, -0.2), 0.25) == 0.25
    h = 0.1
    val = taylor_bound(RatioField(BUMP_R, 1.0), (0.0, 0.0), h, [(0.0, 0.0), (0.05, 0.05)])
    assert val <= np.sqrt(2) * h + h * h + 1e-15
    assert val >= np.sqrt(2) * h


def test_node_taylor_bound_caps_interval_deviation():
    m = build_structured_mesh((-1, 1, -1, 1), 8, 8)
    r = RatioField(BUMP_R, 1.0)
    p = assemble_pencil(m, BUMP_R, 1.0, "neumann")
    for iv in node_intervals(p, r, "sampled", s=8)[::7]:
        b = node_taylor_bound(r, m, iv.node)
        assert max(iv.hi - iv.r_nodal, iv.r_nodal - iv.lo) <= b
        assert node_support(m, iv.node).diameter > 0


def test_taylor_bound_rejects_per_triangle():
    from precspec import PerTriangleConstant
    m = build_structured_mesh((0, 1, 0, 1), 1, 1)
    with pytest.raises(ValidationError):
        taylor_bound(RatioField(PerTriangleConstant([1, 2], m), 1.0), (0, 0), 0.1)
