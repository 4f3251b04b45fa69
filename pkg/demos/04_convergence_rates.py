"""Empirical decay of the truncation error as |tau| grows.

For the kappa = 0 example, each truncation is compared against brute-force
eigenvalues for t = 10^2 .. 10^4, and the slope of log(error) against
log(t) is set beside the decay of the first omitted term.  The same data
pins down the coefficients c_1 and b_2 directly from the oracle.
"""
import numpy as np

from rankone import fixtures
from rankone.oracle import convergence_order, fit_expansion_coefficient
from rankone.perturb import analyze, finite_clusters, infinity_expansion

inst = fixtures.example_generic()
an = analyze(inst)
exp = infinity_expansion(an)
clusters = finite_clusters(inst, an)
ts = [1e2, 1e3, 1e4]

print(f"{'target':<12}{'order':>6}{'fitted':>10}{'predicted':>11}")
for target, orders in [("infinity", (1, 2, 3)), ("cluster-1", (1, 2)), ("cluster-2", (1, 2))]:
    for order in orders:
        fit = convergence_order(inst, an, target, ts, order, expansion=exp, clusters=clusters)
        shown = "exact" if fit.exact else f"{fit.exponent:.3f}"
        print(f"{target:<12}{order:>6}{shown:>10}{fit.predicted:>11.3g}")
# the order-3 escaping error and the order-2 cluster errors reach rounding
# level by t = 10^4, which flattens their fitted slopes.

thetas = np.linspace(0, 6, 7)
c1 = fit_expansion_coefficient(inst, an, "infinity", ts, 2, thetas=thetas, extra_terms=1,
                               expansion=exp, clusters=clusters)
b2 = fit_expansion_coefficient(inst, an, "cluster-2", ts, 1, thetas=thetas, extra_terms=1,
                               expansion=exp, clusters=clusters)
print(f"c_1 from the oracle: {c1.real:.7f}   from the moments: {exp.c1.real:.7f}   5/54 = {5 / 54:.7f}")
print(f"b_2 at zeta_2 from the oracle: {b2.real:.7f}   from the resolvent: {clusters[1].b2.real:.7f}")
