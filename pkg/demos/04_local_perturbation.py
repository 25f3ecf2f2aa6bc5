"""Freezing the ratio on a few supports creates an exact eigenvalue cluster.

Replace k by K g on the supports of a node set J.  Every e_j with j in J
then satisfies A~ e_j = K B e_j, so K is an eigenvalue of multiplicity at
least |J|.  The change A - A~ is small in the B-norm (bounded by the spread
of the ratio around K on those supports), so the original matrix must keep
at least |J| eigenvalues in [inf r, sup r] over the same region.
"""

from precspec import bump_problem, perturbation_experiment

cfg = bump_problem(12)
pencil = cfg.assemble()
center = 6 * 13 + 6
for J in ([center], [center, center + 1], [0, 12, 156, 168], list(range(30, 40))):
    rep = perturbation_experiment(pencil, J)
    print(f"J={J}")
    print(f"  K={rep.K:.5f} appears {rep.multiplicity} times (|J|={len(J)})")
    print(f"  spectral shift |theta| <= {rep.Theta:.4f} <= bound {rep.bound:.4f}")
    print(f"  {rep.count} eigenvalues of the original pencil in "
          f"[{rep.lemma_interval.lo:.4f}, {rep.lemma_interval.hi:.4f}]")
