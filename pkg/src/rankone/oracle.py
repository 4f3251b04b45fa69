"""Brute-force eigenvalues of ``B(tau)`` and comparison with the expansions.

The oracle never uses the analysis path: ``B(tau)`` is formed exactly in
dyadic rationals, its characteristic polynomial comes from exact
Faddeev-LeVerrier and its roots from the Aberth iteration.  The factored
determinant identity ``det(lam I - B) = (char_A / m_A) (m_A - tau p_uv)`` is
only used as a cross-check.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConsistencyError
from .matcore import char_poly, char_poly_exact, rank_one_update_exact, resolvent_moments
from .perturb import (
    branch_point_infinity,
    finite_clusters,
    gamma_finite,
    infinity_expansion,
)
from .poly import cluster_roots, poly_roots

__all__ = [
    "spectrum_B",
    "spectrum_A",
    "matching_distance",
    "determinant_cross_check",
    "SweepResult",
    "sweep",
    "track_continuity",
    "cycle_lengths",
    "expected_cycle_lengths",
    "monodromy_check",
    "AnalyticBranch",
    "analytic_branches",
    "BranchError",
    "ApproxReport",
    "approx_error",
    "ConvergenceFit",
    "predicted_exponent",
    "convergence_order",
    "fit_exponent",
    "fit_expansion_coefficient",
]

CROSS_TOL = 1e-7
MATCH_TOL = 1e-7
GREEDY_FALLBACK = 1.5
MATCHING_MARGIN = 2.0
ASSIGNMENT_MARGIN = 2.0
EXACT_RESIDUAL = 1e-13


def spectrum_B(inst, tau):
    """Eigenvalues of ``A + tau u v^*`` (with repetition), sorted."""
    p = char_poly_exact(rank_one_update_exact(inst.A, inst.u, inst.v, tau))
    return _sorted(poly_roots(p))


def spectrum_A(inst):
    return _sorted(poly_roots(char_poly(inst.A)))


def _sorted(z):
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def matching_distance(a, b):
    """Largest pair distance under the optimal one-to-one matching."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.size != b.size:
        return math.inf
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def determinant_cross_check(inst, tau, analysis, cross_tol=CROSS_TOL):
    """Roots of ``(char_A / m_A) (m_A - tau p_uv)``, checked against the oracle.

    Raises
    ------
    ConsistencyError
        If the two multisets differ by more than ``cross_tol``.
    """
    mp = analysis.minpoly
    factored = mp.quotient * (mp.m_A - complex(tau) * analysis.p_uv)
    roots = _sorted(poly_roots(factored)) if factored.degree() >= 1 else _sorted([])
    direct = spectrum_B(inst, tau)
    dist = matching_distance(roots, direct)
    if not dist <= cross_tol:
        raise ConsistencyError(
            f"determinant identity and char_poly(B) disagree by {dist:.3e} at tau={tau}")
    return roots


# -- sweeps -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SweepResult:
    """Eigenvalues of ``B(t e^{i theta})`` for ``theta = 2 pi j / steps``.

    ``tracks[i, j]`` follows one eigenvalue continuously; ``starts[i]`` is
    its value at ``theta = 0``.  ``monodromy[i]`` is the index of the track
    whose start equals the end of track ``i``.  Eigenvalues that stay on
    ``sigma(A)`` are kept apart in ``persistent`` (the eigenvalue of ``A``)
    and ``persistent_tracks`` (the oracle values).
    """

    t: float
    thetas: np.ndarray
    tracks: np.ndarray
    starts: np.ndarray
    persistent: tuple
    persistent_tracks: np.ndarray
    monodromy: tuple
    warnings: tuple = field(default=())

    @property
    def steps(self):
        return self.thetas.size


def _greedy(prev, new):
    d = np.abs(prev[:, None] - new[None, :])
    order = np.argsort(d, axis=None, kind="stable")
    assign = -np.ones(prev.size, dtype=int)
    used = np.zeros(new.size, dtype=bool)
    for flat in order:
        i, j = divmod(int(flat), new.size)
        if assign[i] < 0 and not used[j]:
            assign[i] = j
            used[j] = True
    return assign, d


def _link(prev, new):
    """Match each point of ``prev`` to one of ``new``; returns (assign, ambiguous)."""
    if prev.size == 0:
        return np.zeros(0, dtype=int), False
    assign, d = _greedy(prev, new)
    d2 = d ** 2
    greedy_cost = d2[np.arange(prev.size), assign].sum()
    r, c = linear_sum_assignment(d2)
    opt_cost = d2[r, c].sum()
    if greedy_cost > GREEDY_FALLBACK * opt_cost and greedy_cost > 0:
        assign = c[np.argsort(r)]
    chosen = d[np.arange(prev.size), assign]
    ambiguous = False
    if new.size > 1:
        alt = d.copy()
        alt[np.arange(prev.size), assign] = np.inf
        ambiguous = bool(np.any(alt.min(axis=1) < MATCHING_MARGIN * chosen))
    return assign, ambiguous


def _split_persistent(slices, eig_A):
    """Count, per distinct eigenvalue of ``A``, how many eigenvalues stay on it."""
    centers = [c.center for c in cluster_roots(eig_A)] if len(eig_A) else []
    counts = []
    for alpha in centers:
        tol = MATCH_TOL * (1 + abs(alpha))
        counts.append(min(int(np.sum(np.abs(s - alpha) <= tol)) for s in slices))
    return centers, counts


def sweep(inst, t, steps=200):
    """Oracle eigenvalues over a full circle ``|tau| = t``, linked into tracks."""
    if steps < 8:
        raise ValueError("steps must be at least 8")
    if not t > 0:
        raise ValueError("t must be positive")
    thetas_full = 2 * np.pi * np.arange(steps + 1) / steps
    slices = [spectrum_B(inst, t * cmath.exp(1j * th)) for th in thetas_full]

    centers, counts = _split_persistent(slices, spectrum_A(inst))
    persistent, moving, pers_vals = [], [], []
    for s in slices:
        s = s.copy()
        keep = np.ones(s.size, dtype=bool)
        vals = []
        for alpha, cnt in zip(centers, counts):
            if cnt == 0:
                continue
            dist = np.where(keep, np.abs(s - alpha), np.inf)
            idx = np.argsort(dist, kind="stable")[:cnt]
            keep[idx] = False
            vals.extend(s[idx])
        moving.append(s[keep])
        pers_vals.append(vals)
    for alpha, cnt in zip(centers, counts):
        persistent.extend([alpha] * cnt)

    m = moving[0].size
    tracks = np.empty((m, steps), dtype=complex)
    current = moving[0]
    warnings = []
    for j in range(1, steps + 1):
        assign, ambiguous = _link(current, moving[j])
        current = moving[j][assign]
        tracks[:, j - 1] = current
        if ambiguous:
            warnings.append(f"ambiguous eigenvalue matching at theta index {j}")

    if m:
        cost = np.abs(tracks[:, -1][:, None] - moving[0][None, :])
        r, c = linear_sum_assignment(cost)
        monodromy = tuple(int(x) for x in c[np.argsort(r)])
    else:
        monodromy = ()
    pers_tracks = np.array([pv for pv in pers_vals[1:]], dtype=complex).T.reshape(len(persistent), steps)
    return SweepResult(float(t), thetas_full[1:], tracks, moving[0].copy(),
                       tuple(persistent), pers_tracks, monodromy, tuple(warnings))


def track_continuity(sw, inst):
    """Check every step of every track against a local speed bound.

    Off ``sigma(A)`` an eigenvalue moves with ``|d lam / d theta| =
    1 / (t |Q'(lam)|)``; each step must stay below ``10 * dtheta`` times the
    largest speed seen along the track.
    """
    dtheta = 2 * np.pi / sw.steps
    for i in range(sw.tracks.shape[0]):
        pts = np.concatenate([[sw.starts[i]], sw.tracks[i]])
        speed = max(1.0 / (sw.t * abs(resolvent_moments(inst.A, inst.u, inst.v, z, 2)[1]))
                    for z in pts)
        if np.max(np.abs(np.diff(pts))) >= 10 * dtheta * speed:
            return False
    return True


def cycle_lengths(perm):
    seen, out = set(), []
    for s in range(len(perm)):
        if s in seen:
            continue
        n, i = 0, s
        while i not in seen:
            seen.add(i)
            i = perm[i]
            n += 1
        out.append(n)
    return sorted(out)


def expected_cycle_lengths(analysis, clusters):
    """Cycle type predicted by the expansions: one (kappa+1)-cycle and one
    k-cycle per cluster, colliding clusters included."""
    if analysis.is_degenerate:
        return []
    return sorted([analysis.kappa + 1] + [c.k for c in clusters])


def monodromy_check(sw, expected):
    """True iff the nontrivial cycles of the sweep monodromy match ``expected``."""
    got = [c for c in cycle_lengths(sw.monodromy) if c > 1]
    want = sorted(c for c in expected if c > 1)
    return got == want


# -- analytic branches and errors -------------------------------------------

@dataclass(frozen=True)
class AnalyticBranch:
    branch_id: str
    target: str
    order: int
    index: int
    cluster: object = None


def analytic_branches(expansion, clusters, order):
    """One entry per analytic eigenvalue branch; colliding clusters are skipped."""
    out = []
    if expansion is not None:
        for j in range(1, expansion.kappa + 2):
            out.append(AnalyticBranch(f"inf-{j}", "infinity", order, j))
    for c in clusters:
        if c.collides_with_mA:
            continue
        for j in range(1, c.k + 1):
            out.append(AnalyticBranch(f"cluster-{c.cluster_id}-{j}",
                                      f"cluster-{c.cluster_id}", min(order, 2), j, c))
    return out


def branch_values(branch, expansion, t, thetas):
    if branch.target == "infinity":
        return branch_point_infinity(expansion, branch.index, t, thetas, branch.order)
    return gamma_finite(branch.cluster, branch.index, t, thetas, branch.order)


@dataclass(frozen=True)
class BranchError:
    branch_id: str
    target: str
    order: int
    track: int
    max_error: float
    mean_error: float
    ambiguous: bool = False


@dataclass(frozen=True)
class ApproxReport:
    """Per-branch distance between oracle tracks and truncated expansions."""

    t: float
    order: int
    branches: tuple
    unassigned_tracks: tuple = ()
    decay: tuple = ()

    def for_target(self, target):
        return [b for b in self.branches if b.target == target]


def approx_error(inst, analysis, t, steps=200, order=2, expansion=None,
                 clusters=None, sw=None):
    """Compare oracle tracks at radius ``t`` with the order-``order`` expansions.

    Each track is assigned to the analytic branch with the smallest mean
    distance (optimal assignment).  A branch is flagged ``ambiguous`` when
    another branch is within ``ASSIGNMENT_MARGIN`` of its assigned cost.
    """
    if expansion is None and not analysis.is_degenerate:
        expansion = infinity_expansion(analysis)
    if clusters is None:
        clusters = finite_clusters(inst, analysis) if not analysis.is_degenerate else []
    if sw is None:
        sw = sweep(inst, t, steps)
    branches = analytic_branches(expansion, clusters, order)
    ntr = sw.tracks.shape[0]
    if not branches or ntr == 0:
        return ApproxReport(sw.t, order, (), tuple(range(ntr)))
    vals = np.array([branch_values(b, expansion, sw.t, sw.thetas) for b in branches])
    err = np.abs(sw.tracks[:, None, :] - vals[None, :, :])
    cost = err.mean(axis=2)
    r, c = linear_sum_assignment(cost)
    out = []
    for ti, bi in sorted(zip(r, c), key=lambda p: p[1]):
        b = branches[bi]
        others = np.delete(cost[ti], bi)
        ambiguous = bool(others.size and others.min() < ASSIGNMENT_MARGIN * cost[ti, bi])
        out.append(BranchError(b.branch_id, b.target, b.order, int(ti),
                               float(err[ti, bi].max()), float(cost[ti, bi]), ambiguous))
    unassigned = tuple(sorted(set(range(ntr)) - set(int(x) for x in r)))
    return ApproxReport(sw.t, order, tuple(out), unassigned)


# -- convergence ------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceFit:
    """Least-squares slope of ``log(max residual)`` against ``log t``.

    ``exponent`` is ``None`` and ``exact`` is set when every residual is at
    rounding level.
    """

    target: str
    order: int
    t_values: tuple
    residuals: tuple
    exponent: float | None
    exact: bool
    predicted: float


def predicted_exponent(target, order, analysis, clusters):
    """Decay rate of the first omitted term of the truncated expansion."""
    if target == "infinity":
        return -(order - 1) / (analysis.kappa + 1)
    k = next(c.k for c in clusters if f"cluster-{c.cluster_id}" == target)
    return -(min(order, 2) + 1) / k


def convergence_order(inst, analysis, target, t_list, order, steps=64,
                      expansion=None, clusters=None):
    """Fit the decay exponent of the truncation error for one target.

    ``target`` is ``"infinity"`` or ``"cluster-<id>"``.
    """
    t_list = [float(t) for t in t_list]
    if len(t_list) < 3:
        raise ValueError("need at least three t values")
    if expansion is None:
        expansion = infinity_expansion(analysis)
    if clusters is None:
        clusters = finite_clusters(inst, analysis)
    residuals = []
    for t in t_list:
        rep = approx_error(inst, analysis, t, steps, order, expansion, clusters)
        errs = [b.max_error for b in rep.for_target(target)]
        if not errs:
            raise ValueError(f"no oracle track assigned to target {target!r}")
        residuals.append(max(errs))
    pred = predicted_exponent(target, order, analysis, clusters)
    slope, exact = fit_exponent(t_list, residuals)
    return ConvergenceFit(target, order, tuple(t_list), tuple(residuals), slope, exact, pred)


def fit_exponent(t_values, residuals):
    """Slope of ``log r`` against ``log t``; ``(None, True)`` at rounding level.

    A residual counts as rounding level when it is below ``EXACT_RESIDUAL``
    relative to ``1 + t``, the size of the eigenvalues being compared.
    """
    t_arr = np.asarray(t_values, dtype=float)
    if np.all(np.asarray(residuals, dtype=float) < EXACT_RESIDUAL * (1 + t_arr)):
        return None, True
    if len(t_values) < 2:
        return None, False
    r = np.maximum(np.asarray(residuals, dtype=float), EXACT_RESIDUAL)
    return float(np.polyfit(np.log(t_values), np.log(r), 1)[0]), False


def fit_expansion_coefficient(inst, analysis, target, t_list, order, thetas=(0.0,),
                              extra_terms=0, expansion=None, clusters=None):
    """Estimate the first coefficient omitted by an order-``order`` truncation.

    The oracle eigenvalue nearest to the truncated expansion is taken at
    each ``tau = t e^{i theta}`` and the residual is fitted by least squares
    to ``sum_i x_i s^(p+i)``, ``i = 0..extra_terms``, where ``s`` is the
    branch value of ``tau^{-1/K}`` and ``p`` the power of the omitted term.
    For ``"infinity"`` the result is ``c_{order-1}``; for a cluster it is
    ``b_{order+1}`` (the sign convention of the expansion is undone).
    """
    if expansion is None:
        expansion = infinity_expansion(analysis)
    if clusters is None:
        clusters = finite_clusters(inst, analysis)
    rows, rhs = [], []
    for t in t_list:
        for th in thetas:
            tau = t * cmath.exp(1j * th)
            eig = spectrum_B(inst, tau)
            if target == "infinity":
                K = expansion.kappa + 1
                approx = branch_point_infinity(expansion, K, t, th, order)
                p = order - 1
            else:
                cl = next(c for c in clusters if f"cluster-{c.cluster_id}" == target)
                K = cl.k
                approx = gamma_finite(cl, K, t, th, order)
                p = order + 1
            s = t ** (-1.0 / K) * cmath.exp(-1j * (th + 2 * math.pi * K) / K)
            lam = eig[np.argmin(np.abs(eig - approx))]
            rows.append([s ** (p + i) for i in range(extra_terms + 1)])
            rhs.append(lam - approx)
    coef = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0][0]
    return complex(coef) if target == "infinity" else complex(-coef)
