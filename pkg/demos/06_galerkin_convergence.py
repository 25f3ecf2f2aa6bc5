"""Galerkin approximations of Z = B^{-1} A on nested meshes.

The finest mesh stands in for the continuum.  On each coarser level we
compare the Galerkin solution of Z w = f with the best B-norm
approximation of w (their ratio is bounded by sup r / inf r = 3), and track
how well Z_n w approaches Z w.
"""

from precspec import bump_problem, convergence_study

for w in ("sin(pi*x)*sin(pi*y)", "exp(x)*cos(2*y)", "x*y"):
    rep = convergence_study(bump_problem(4), w, levels=5)
    print(f"w = {w}   (kappa = {rep.kappa:.4f})")
    for lv in rep.levels:
        print(f"  level {lv.level}: dofs {lv.n_dofs:>5}  |w-w_n|_B {lv.err_galerkin:.4e}  "
              f"best {lv.err_best:.4e}  ratio {lv.quasi_optimality:.5f}  "
              f"|Zw-Z_n w|_B {lv.pointwise_error:.4e}")
