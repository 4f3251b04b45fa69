"""A limit point that is also an eigenvalue of A.

A = diag(1, 0.5, 1.5), u = v = (0, 1, 1).  Then p_uv = 2 (lam - 1)^2 has a
double root at 1, which is itself an eigenvalue of A.  The expansion around
a limit point does not apply there; instead one eigenvalue stays at 1 for
every tau and the other circles around it.
"""
import numpy as np

from rankone import fixtures
from rankone.oracle import cycle_lengths, spectrum_B, sweep
from rankone.perturb import analyze, finite_clusters

inst = fixtures.example_collision()
an = analyze(inst)
print("p_uv coefficients (ascending):", np.round(an.p_uv.coeffs.real, 12))
for c in finite_clusters(inst, an):
    print(f"cluster at {c.zeta.real:.12g}, multiplicity {c.k}, "
          f"eigenvalue of A: {c.collides_with_mA}")

for tau in (1.0, np.exp(1j * np.pi / 3), -25.0, 1e4j):
    eig = spectrum_B(inst, tau)
    print(f"tau = {tau:>12.4g}: distance of nearest eigenvalue to 1 = {np.min(np.abs(eig - 1)):.1e}")

sw = sweep(inst, 1.0, 200)
print("persistent eigenvalues:", sw.persistent)
print("max drift of the pinned eigenvalue:", np.max(np.abs(sw.persistent_tracks - 1)))
print("moving tracks:", sw.tracks.shape[0], " monodromy cycle lengths:", cycle_lengths(sw.monodromy))
