"""Eigenvalues of A + tau u v* on the circle |tau| = t.

A = diag(-1, 0, 1), u = (1, 1, 1), v = (1, 2, 3).  Here v*u = 6 is nonzero,
so one eigenvalue escapes to infinity along 6 tau + 1/3, while the other
two settle on the roots of p_uv(lam) = 6 lam^2 + 2 lam - 2.

Writes circles_t1.svg and circles_t1.csv into demo_output/.
"""
import pathlib

import numpy as np

from rankone import fixtures
from rankone.fileio import render_svg, track_rows, write_track_csv, atomic_write
from rankone.oracle import analytic_branches, approx_error, branch_values, sweep
from rankone.perturb import analyze, finite_clusters, infinity_expansion

out = pathlib.Path(__file__).with_name("demo_output")
out.mkdir(exist_ok=True)

inst = fixtures.example_generic()
an = analyze(inst)
exp = infinity_expansion(an)
clusters = finite_clusters(inst, an)

print("kappa =", an.kappa, " p_uv coefficients (ascending):", np.round(an.p_uv.coeffs.real, 12))
print(f"escaping branch: {exp.c_minus1.real:g} tau + {exp.c0.real:.6f} + {exp.c1.real:.6f}/tau + ...")
for c in clusters:
    print(f"limit point zeta_{c.cluster_id} = {c.zeta.real:+.6f}: "
          f"lam ~ zeta - {c.b1.real:.6f}/tau - ({c.b2.real:.3e})/tau^2")

# One oracle sweep, compared against the first- and second-order expansions
t = 1.0
sw = sweep(inst, t, 200)
for order in (1, 2):
    rep = approx_error(inst, an, t, order=order, expansion=exp, clusters=clusters, sw=sw)
    errs = ", ".join(f"{b.target}: {b.max_error:.2e}" for b in rep.branches)
    print(f"t = {t:g}, order {order} max errors -> {errs}")

# Already at t = 1 the first-order circles are close for the finite points;
# the escaping branch needs the constant shift c0.
grid = 2 * np.pi * np.arange(201) / 200
first = [branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, 1)]
second = [branch_values(b, exp, t, grid) for b in analytic_branches(exp, clusters, 2)]
pts = sw.tracks.ravel()
atomic_write(out / "circles_t1.svg", render_svg(pts, first, second, title="t = 1"))

rep = approx_error(inst, an, t, order=1, expansion=exp, clusters=clusters, sw=sw)
curves = {b.branch_id: branch_values(b, exp, t, sw.thetas)
          for b in analytic_branches(exp, clusters, 1)}
write_track_csv(out / "circles_t1.csv", track_rows(sw, rep, curves, clusters))
print("wrote", out / "circles_t1.svg", "and", out / "circles_t1.csv")
