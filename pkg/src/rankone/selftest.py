"""Built-in checks over the reference instances.

Every check records what was expected and what was computed.  The run is
deterministic: no randomness and no timing enter the report.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import fixtures
from .fileio import fmt_complex, fmt_real
from .oracle import (
    approx_error,
    convergence_order,
    determinant_cross_check,
    expected_cycle_lengths,
    fit_expansion_coefficient,
    matching_distance,
    monodromy_check,
    spectrum_B,
    sweep,
)
from .perturb import analyze, b2_alternative, finite_clusters, infinity_expansion

__all__ = ["Check", "run_selftest", "format_report"]

# competing closed form for c_1 of the kappa-one instance, kept as a foil
COMPETING_C1_KAPPA_ONE = -5 * math.sqrt(2) / (24 * math.sqrt(3)) * 1j
B2_AGREEMENT_RTOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    expected: str
    actual: str
    passed: bool


def _close(a, b, tol):
    return abs(complex(a) - complex(b)) <= tol


def _generic():
    inst = fixtures.example_generic()
    an = analyze(inst)
    return inst, an, infinity_expansion(an), finite_clusters(inst, an)


def _checks_generic(out):
    inst, an, exp, cl = _generic()
    want = np.array([-2, 2, 6])
    got = np.pad(an.p_uv.coeffs, (0, 3 - an.p_uv.coeffs.size))
    out.append(Check("generic: p_uv coefficients", "-2, 2, 6",
                     ", ".join(fmt_complex(c) for c in got),
                     bool(np.allclose(got, want, rtol=0, atol=1e-9))))
    roots = sorted((c.zeta for c in cl), key=lambda z: z.real)
    ref = sorted([(-1 - math.sqrt(13)) / 6, (-1 + math.sqrt(13)) / 6])
    out.append(Check("generic: roots of p_uv", ", ".join(fmt_real(r) for r in ref),
                     ", ".join(fmt_complex(r) for r in roots),
                     all(_close(a, b, 1e-9) for a, b in zip(roots, ref))))
    out.append(Check("generic: kappa, c_-1, c_0", "0, 6, 0.333333333333",
                     f"{an.kappa}, {fmt_complex(exp.c_minus1)}, {fmt_complex(exp.c0)}",
                     an.kappa == 0 and _close(exp.c_minus1, 6, 1e-10)
                     and _close(exp.c0, 1 / 3, 1e-10)))
    z1, z2 = cl[0], cl[1]
    out.append(Check("generic: b_1 at both roots, b_2 at zeta_1",
                     "0.0489, 0.0437, -9.5594e-04",
                     f"{fmt_complex(z1.b1)}, {fmt_complex(z2.b1)}, {fmt_complex(z1.b2)}",
                     _close(z1.b1, 0.0489, 5e-4) and _close(z2.b1, 0.0437, 5e-4)
                     and _close(z1.b2, -9.5594e-4, 5e-7)))
    out.append(Check("generic: c_1 from the moments", "5/54 = 0.0925925925926",
                     fmt_complex(exp.c1), _close(exp.c1, 5 / 54, 1e-12)))
    fit = fit_expansion_coefficient(inst, an, "infinity", [1e2, 1e3, 1e4], 2,
                                    thetas=np.linspace(0, 6, 7), extra_terms=1,
                                    expansion=exp, clusters=cl)
    out.append(Check("generic: c_1 fitted from oracle eigenvalues", "5/54 +- 1e-3",
                     fmt_complex(fit), _close(fit, 5 / 54, 1e-3)))
    fit = fit_expansion_coefficient(inst, an, "cluster-2", [1e2, 1e3, 1e4], 1,
                                    thetas=np.linspace(0, 6, 7), extra_terms=1,
                                    expansion=exp, clusters=cl)
    out.append(Check("generic: b_2 at zeta_2 fitted from oracle eigenvalues",
                     f"{fmt_complex(z2.b2)} +- 5e-4", fmt_complex(fit),
                     _close(fit, z2.b2, 5e-4) and _close(fit, -6.25e-3, 5e-4)))
    for c in cl:
        alt = b2_alternative(c.a_k1, c.a_k2, c.k, c.b1)
        out.append(Check(f"generic: b_2 two-formula agreement at zeta_{c.cluster_id}",
                         fmt_complex(alt), fmt_complex(c.b2),
                         _close(c.b2, alt, B2_AGREEMENT_RTOL * abs(alt))))
    for tau in (1, 1j, 10):
        a = spectrum_B(inst, tau)
        d = matching_distance(a, determinant_cross_check(inst, tau, an))
        out.append(Check(f"generic: determinant identity at tau={fmt_complex(tau)}",
                         "< 1e-7", fmt_real(d), d < 1e-7))
    sw = sweep(inst, 1.0, 200)
    out.append(Check("generic: monodromy at t=1", "identity",
                     " ".join(map(str, sw.monodromy)),
                     monodromy_check(sw, expected_cycle_lengths(an, cl))
                     and list(sw.monodromy) == list(range(len(sw.monodromy)))))
    o1 = approx_error(inst, an, 1.0, order=1, expansion=exp, clusters=cl, sw=sw)
    o2 = approx_error(inst, an, 1.0, order=2, expansion=exp, clusters=cl, sw=sw)
    e1 = o1.for_target("infinity")[0].max_error
    e2 = o2.for_target("infinity")[0].max_error
    ez = o1.for_target("cluster-1")[0].max_error
    out.append(Check("generic: t=1 errors (zeta_1 order 1; infinity order 2 < order 1)",
                     "< 5e-3; decreasing", f"{fmt_real(ez)}; {fmt_real(e1)} -> {fmt_real(e2)}",
                     ez < 5e-3 and e2 < e1))
    ts = [1e2, 1e3, 1e4]
    f = convergence_order(inst, an, "infinity", ts, 2, expansion=exp, clusters=cl)
    out.append(Check("generic: infinity order-2 decay exponent", "-1 +- 0.15",
                     fmt_real(f.exponent), abs(f.exponent + 1) <= 0.15))
    f = convergence_order(inst, an, "cluster-2", ts, 1, expansion=exp, clusters=cl)
    out.append(Check("generic: zeta_2 order-1 decay exponent", "-2 +- 0.2",
                     fmt_real(f.exponent), abs(f.exponent + 2) <= 0.2))


def _checks_kappa_one(out):
    inst = fixtures.example_kappa_one()
    an = analyze(inst)
    exp = infinity_expansion(an)
    cl = finite_clusters(inst, an)
    mus = an.moments[:4]
    out.append(Check("kappa-one: kappa and moments", "1; 0, -1.5, 0.5, -1.5",
                     f"{an.kappa}; " + ", ".join(fmt_complex(m) for m in mus),
                     an.kappa == 1 and all(_close(a, b, 1e-12)
                                           for a, b in zip(mus, [0, -1.5, 0.5, -1.5]))))
    out.append(Check("kappa-one: c_-1^2 and c_0", "-1.5, -0.166666666667",
                     f"{fmt_complex(exp.c_minus1 ** 2)}, {fmt_complex(exp.c0)}",
                     _close(exp.c_minus1 ** 2, -1.5, 1e-10) and _close(exp.c0, -1 / 6, 1e-10)))
    ref = -11 * math.sqrt(2) / (24 * math.sqrt(3)) * 1j
    out.append(Check("kappa-one: c_1 from the moments", fmt_complex(ref),
                     fmt_complex(exp.c1), _close(exp.c1, ref, 1e-12)))
    sw = sweep(inst, 4.0, 200)
    out.append(Check("kappa-one: monodromy at t=4", "one 2-cycle",
                     " ".join(map(str, sw.monodromy)),
                     monodromy_check(sw, expected_cycle_lengths(an, cl))))
    ts = [1e2, 1e3, 1e4]
    good = convergence_order(inst, an, "infinity", ts, 3, expansion=exp, clusters=cl)
    bad_exp = dataclasses.replace(exp, c1=COMPETING_C1_KAPPA_ONE)
    bad = convergence_order(inst, an, "infinity", ts, 3, expansion=bad_exp, clusters=cl)
    out.append(Check("kappa-one: order-3 decay, moment c_1 vs competing c_1",
                     f"{fmt_real(good.predicted)} +- 0.2 vs slower",
                     f"{fmt_real(good.exponent)} vs {fmt_real(bad.exponent)}",
                     abs(good.exponent - good.predicted) <= 0.2
                     and bad.exponent > good.exponent + 0.3))
    for c in cl:
        alt = b2_alternative(c.a_k1, c.a_k2, c.k, c.b1)
        out.append(Check(f"kappa-one: b_2 two-formula agreement at zeta_{c.cluster_id}",
                         fmt_complex(alt), fmt_complex(c.b2),
                         _close(c.b2, alt, B2_AGREEMENT_RTOL * abs(alt))))


def _checks_collision(out):
    inst = fixtures.example_collision()
    an = analyze(inst)
    ok = an.p_uv.allclose(np.array([2, -4, 2]) + 0j, atol=1e-9)
    out.append(Check("collision: p_uv = 2 (lam - 1)^2", "2, -4, 2",
                     ", ".join(fmt_complex(c) for c in an.p_uv.coeffs), ok))
    cl = finite_clusters(inst, an)
    c = cl[0]
    out.append(Check("collision: cluster at 1 flagged", "zeta=1, k=2, colliding",
                     f"zeta={fmt_complex(c.zeta)}, k={c.k}, "
                     f"{'colliding' if c.collides_with_mA else 'not colliding'}",
                     len(cl) == 1 and _close(c.zeta, 1, 1e-9) and c.k == 2
                     and c.collides_with_mA))
    sw = sweep(inst, 1.0, 200)
    dev = (float(np.max(np.abs(sw.persistent_tracks[0] - 1.0)))
           if len(sw.persistent) == 1 else math.inf)
    out.append(Check("collision: persistent eigenvalue at 1 for all theta",
                     "1 within 1e-7", ", ".join(fmt_complex(p) for p in sw.persistent)
                     + f" (max deviation {fmt_real(dev)})",
                     len(sw.persistent) == 1 and _close(sw.persistent[0], 1, 1e-7)
                     and dev <= 1e-7))


def _checks_edge(out):
    inst = fixtures.degenerate_nilpotent()
    an = analyze(inst)
    worst = max(float(np.max(np.abs(spectrum_B(inst, tau))))
                for tau in (1, 1j, -10, 100j))
    out.append(Check("nilpotent: fully degenerate, spectrum {0, 0}",
                     "FullyDegenerate, 0", f"{an.classification.value}, {fmt_real(worst)}",
                     an.is_degenerate and worst <= 1e-9))
    inst = fixtures.scalar_identity()
    an = analyze(inst)
    exp = infinity_expansion(an)
    worst = 0.0
    for t in (0.5, 1.0, 10.0):
        rep = approx_error(inst, an, t, steps=200, order=3, expansion=exp, clusters=[])
        worst = max(worst, max(b.max_error for b in rep.branches))
    out.append(Check("scalar: order-3 expansion is exact", "<= 1e-12", fmt_real(worst),
                     worst <= 1e-12))


def run_selftest():
    """Run every check and return the list of :class:`Check` results."""
    out = []
    for group in (_checks_generic, _checks_kappa_one, _checks_collision, _checks_edge):
        group(out)
    return out


def format_report(checks, color=False):
    green, red, reset = ("\033[32m", "\033[31m", "\033[0m") if color else ("", "", "")
    lines = []
    for c in checks:
        tag = f"{green}PASS{reset}" if c.passed else f"{red}FAIL{reset}"
        lines.append(f"{tag}  {c.name}")
        lines.append(f"      expected: {c.expected}")
        lines.append(f"      actual:   {c.actual}")
    npass = sum(c.passed for c in checks)
    lines.append(f"{npass}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"

