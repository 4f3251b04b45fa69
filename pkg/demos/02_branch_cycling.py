"""Two eigenvalues escaping together and swapping places around the circle.

With v = (1, -1/2, -1/2) the first moment v*u vanishes, so kappa = 1 and two
eigenvalues escape like +-sqrt(-3 tau / 2).  Carrying theta once around
[0, 2 pi] exchanges them: the sweep monodromy contains a 2-cycle.
"""
import pathlib

import numpy as np

from rankone import fixtures
from rankone.fileio import atomic_write, render_svg
from rankone.oracle import (
    analytic_branches,
    approx_error,
    branch_values,
    convergence_order,
    cycle_lengths,
    sweep,
)
from rankone.perturb import analyze, finite_clusters, infinity_expansion

out = pathlib.Path(__file__).with_name("demo_output")
out.mkdir(exist_ok=True)

inst = fixtures.example_kappa_one()
an = analyze(inst)
exp = infinity_expansion(an)
clusters = finite_clusters(inst, an)
print("moments v* A^j u:", np.round(np.real(an.moments[:4]), 12))
print("kappa =", an.kappa)
print(f"c_-1 = {exp.c_minus1:.6f}  (c_-1^2 = {exp.c_minus1 ** 2:.6f})")
print(f"c_0  = {exp.c0.real:.6f}")
print(f"c_1  = {exp.c1:.6f}")

t = 4.0
sw = sweep(inst, t, 200)
print("monodromy:", sw.monodromy, " cycle lengths:", cycle_lengths(sw.monodromy))

for order in (1, 2, 3):
    rep = approx_error(inst, an, t, order=order, expansion=exp, clusters=clusters, sw=sw)
    worst = max(b.max_error for b in rep.for_target("infinity"))
    print(f"order {order}: worst error on the escaping pair at t = 4: {worst:.3e}")

grid = 2 * np.pi * np.arange(201) / 200
first = [branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, 1)]
third = [branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, 3)]
atomic_write(out / "cycling_t4.svg", render_svg(sw.tracks.ravel(), first, third, title="t = 4"))
print("wrote", out / "cycling_t4.svg")

# How fast does the order-3 truncation converge?  The first omitted term is
# c_2 tau^{-1}, so the error should fall by one decade per decade of t.
fit = convergence_order(inst, an, "infinity", [1e2, 1e3, 1e4], 3, expansion=exp, clusters=clusters)
print("order-3 residuals:", ", ".join(f"{r:.3e}" for r in fit.residuals))
print(f"fitted exponent {fit.exponent:.3f}, first omitted term decays like t^{fit.predicted:g}")
