"""Approximate eigenvectors for a point of the continuous spectrum.

Take lambda0 = r(x0).  The sum of hat functions supported inside a small
disc around x0, normalized in the B-norm, is nearly an eigenvector: the
residual (lambda0 - B^{-1} A) v shrinks with the radius, bounded by the
variation of g lambda0 - k over the disc.
"""

from precspec import bump_problem, weyl_sequence_demo

rep = weyl_sequence_demo(bump_problem(64), x0=(0.0, 0.0), radii=(0.5, 0.25, 0.125, 0.0625))
print(f"x0={rep.center}, lambda0={rep.lambda0}")
for row in rep.rows:
    print(f"  r={row.radius:<7g} hats={row.n_nodes:<4} |u_r|_B={row.norm_u:.5f}  bound={row.bound:.5f}")
