"""CSV tables and SVG figures for experiment reports.

Floats are written with ``repr`` (shortest round-trip form), so repeated
runs with the same inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "fmt",
    "write_csv",
    "write_eigs_csv",
    "write_localize_csv",
    "write_study_csv",
    "write_perturb_csv",
    "write_weyl_csv",
    "write_converge_csv",
    "pairing_svg",
]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_eigs_csv(path, eigs):
    lam = np.asarray(getattr(eigs, "values", eigs), dtype=float)
    if lam.size == 0:
        raise ValidationError("no eigenvalues to write")
    return write_csv(path, ["index", "eigenvalue"], enumerate(np.sort(lam).tolist()))


def write_localize_csv(path, intervals, eigs, matching):
    lam = np.asarray(getattr(eigs, "values", eigs), dtype=float)
    rows = []
    for i, iv in enumerate(intervals):
        k = int(matching.perm[i]) if matching is not None else -1
        matched = float(lam[k]) if k >= 0 else ""
        rows.append([iv.node, iv.point[0], iv.point[1], iv.r_nodal, iv.lo, iv.hi, matched, iv.width])
    return write_csv(path, ["node", "x", "y", "r_nodal", "lo", "hi", "matched_eigenvalue", "width"],
                     rows)


def write_study_csv(path, report):
    rows = [[lv.level, lv.n_dofs, lv.h_max, lv.lambda_min, lv.lambda_max, lv.fill_distance,
             lv.max_width] for lv in report.levels]
    return write_csv(path, ["level", "n_dofs", "h_max", "lambda_min", "lambda_max",
                            "fill_distance", "max_width"], rows)


def write_perturb_csv(path, report):
    row = [" ".join(str(j) for j in report.nodes), report.K, report.multiplicity,
           report.theta_min, report.theta_max, report.Theta, report.bound, report.count]
    return write_csv(path, ["J", "K", "multiplicity", "theta_min", "theta_max", "Theta",
                            "bound", "count"], [row])


def write_weyl_csv(path, report):
    rows = [[report.center[0], report.center[1], report.lambda0, r.radius, r.norm_u, r.bound]
            for r in report.rows]
    return write_csv(path, ["x0", "y0", "lambda0", "radius", "norm_u", "bound"], rows)


def write_converge_csv(path, report):
    rows = [[lv.level, lv.n_dofs, lv.err_galerkin, lv.err_best, lv.quasi_optimality,
             lv.pointwise_error] for lv in report.levels]
    return write_csv(path, ["level", "n_dofs", "err_galerkin", "err_best", "quasi_optimality",
                            "pointwise_error"], rows)


# --------------------------------------------------------------------------
# SVG

W, H = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 40, 70


def _nice_ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _f(v):
    return f"{v:.2f}"


def pairing_svg(path, eigenvalues, nodal_values, title="Sorted eigenvalues and nodal values of k/g"):
    """Scatter of sorted eigenvalues (circles) and sorted nodal ratios (asterisks) by index."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    r = np.sort(np.asarray(nodal_values, dtype=float))
    if lam.size == 0:
        raise ValidationError("no eigenvalues to plot")
    n = max(len(lam), len(r))
    ylo = float(min(lam.min(), r.min() if r.size else lam.min()))
    yhi = float(max(lam.max(), r.max() if r.size else lam.max()))
    pad = 0.05 * (yhi - ylo or 1.0)
    ylo, yhi = ylo - pad, yhi + pad
    xlo, xhi = 0.0, float(max(n - 1, 1))
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def X(v):
        return LEFT + (v - xlo) / (xhi - xlo) * pw

    def Y(v):
        return TOP + (yhi - v) / (yhi - ylo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="24" text-anchor="middle" font-family="sans-serif" '
           f'font-size="16">{title}</text>',
           f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _nice_ticks(ylo, yhi):
        y = Y(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{_f(y)}" x2="{LEFT}" y2="{_f(y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_f(y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12">{t:g}</text>')
    for t in _nice_ticks(xlo, xhi):
        x = X(t)
        out.append(f'<line x1="{_f(x)}" y1="{TOP + ph}" x2="{_f(x)}" y2="{TOP + ph + 5}" '
                   'stroke="black"/>')
        out.append(f'<text x="{_f(x)}" y="{TOP + ph + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{t:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{H - 20}" text-anchor="middle" '
               'font-family="sans-serif" font-size="14">index (sorted)</text>')
    out.append(f'<text x="20" y="{TOP + ph / 2}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="14" transform="rotate(-90 20 {TOP + ph / 2})">value</text>')

    for i, v in enumerate(r):
        out.append(_asterisk(X(i), Y(v), "red"))
    for i, v in enumerate(lam):
        out.append(f'<circle cx="{_f(X(i))}" cy="{_f(Y(v))}" r="3" fill="none" stroke="blue"/>')

    lx, ly = LEFT + 15, TOP + 20
    out.append(f'<circle cx="{lx}" cy="{ly}" r="4" fill="none" stroke="blue"/>')
    out.append(f'<text x="{lx + 12}" y="{ly + 4}" font-family="sans-serif" font-size="12">'
               'generalized eigenvalues</text>')
    out.append(_asterisk(lx, ly + 20, "red"))
    out.append(f'<text x="{lx + 12}" y="{ly + 24}" font-family="sans-serif" font-size="12">'
               'nodal values of k/g</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
    return Path(path)


def _asterisk(x, y, color, s=4.0):
    d = s * 0.7071
    segs = [(x - s, y, x + s, y), (x, y - s, x, y + s),
            (x - d, y - d, x + d, y + d), (x - d, y + d, x + d, y - d)]
    body = "".join(f"M{_f(a)} {_f(b)}L{_f(c)} {_f(e)}" for a, b, c, e in segs)
    return f'<path d="{body}" stroke="{color}" stroke-width="1"/>'
