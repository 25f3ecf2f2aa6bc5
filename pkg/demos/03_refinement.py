"""Refining the mesh fills the whole interval [1, 3].

A handful of eigenvalues cannot resolve a continuous spectrum.  As the mesh
is refined, the largest gap between [1, 3] and the eigenvalues (the fill
distance) halves, and so does the widest nodal ratio interval, since r is
Lipschitz and supports shrink with h.
"""

from precspec import bump_problem, refinement_study

rep = refinement_study(bump_problem(8), levels=3, target=(1.0, 3.0))
print(f"{'level':>5} {'dofs':>6} {'h_max':>8} {'lambda_min':>11} {'lambda_max':>11} "
      f"{'fill':>8} {'max width':>10}")
for lv in rep.levels:
    print(f"{lv.level:>5} {lv.n_dofs:>6} {lv.h_max:>8.4f} {lv.lambda_min:>11.6f} "
          f"{lv.lambda_max:>11.6f} {lv.fill_distance:>8.5f} {lv.max_width:>10.5f}")
print("fill ratios:", [round(r, 3) for r in rep.fill_ratios()])
print("width ratios:", [round(r, 3) for r in rep.width_ratios()])
