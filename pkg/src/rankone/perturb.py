"""Asymptotics of the eigenvalues of ``B(tau) = A + tau u v^*`` as ``|tau| -> oo``.

The instance is first classified by its Krylov moments ``mu_j = v^* A^j u``.
If ``mu_0 = ... = mu_{l-1} = 0`` (``l`` the degree of the minimal polynomial)
the perturbation never moves the spectrum.  Otherwise ``kappa`` is the first
index with ``mu_kappa != 0``; ``kappa + 1`` eigenvalues escape to infinity
along

    lam(tau) = c_{-1} tau^{1/(kappa+1)} + c_0 + c_1 tau^{-1/(kappa+1)} + ...

and the remaining ``l - kappa - 1`` converge to the roots of
``p_uv(lam) = v^* m_A(lam) (lam I - A)^{-1} u``.  Near a root ``zeta`` of
multiplicity ``k`` that is not an eigenvalue of ``A``

    lam(tau) = zeta - b_1 tau^{-1/k} - b_2 tau^{-2/k} - ...

Fractional powers of ``tau`` are taken on branch ``j`` as
``t^{1/K} exp(i (theta + 2 pi j) / K)`` for ``tau = t exp(i theta)``, while
the coefficients themselves use principal roots.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisUnavailable, NumericalFailure
from .matcore import (
    as_cmatrix,
    as_cvector,
    collides_with_spectrum,
    minimal_poly,
    moments as krylov_moments,
    resolvent_moments,
)
from .poly import CPoly, cluster_roots, poly_derivative, poly_roots

__all__ = [
    "ProblemInstance",
    "Classification",
    "PerturbationAnalysis",
    "PuiseuxInfinity",
    "FiniteCluster",
    "analyze",
    "build_puv",
    "infinity_expansion",
    "finite_clusters",
    "principal_root",
    "b1_coefficient",
    "b2_direct",
    "b2_alternative",
    "branch_point_infinity",
    "gamma_finite",
    "multiplicity_at",
    "refine_multiple_root",
]

MOMENT_ZERO_TOL = 1e-10
CRIT_TOL = 1e-8
DERIVATIVE_TOL = 1e-8
A_NONZERO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """The triple ``(A, u, v)`` defining ``B(tau) = A + tau u v^*``."""

    A: np.ndarray
    u: np.ndarray
    v: np.ndarray
    label: str = ""

    def __post_init__(self):
        A = as_cmatrix(self.A)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "u", as_cvector(self.u, A.shape[0]))
        object.__setattr__(self, "v", as_cvector(self.v, A.shape[0]))

    @property
    def n(self):
        return self.A.shape[0]

    def B(self, tau):
        return self.A + complex(tau) * np.outer(self.u, self.v.conj())


class Classification(enum.Enum):
    FULLY_DEGENERATE = "FullyDegenerate"
    REGULAR = "Regular"


@dataclass(frozen=True)
class PerturbationAnalysis:
    """Moments, minimal polynomial and classification of an instance.

    ``moments`` holds ``v^* A^j u`` for ``j = 0..l+1``, with the entries
    declared zero by the tolerance test set to exactly ``0``.
    """

    minpoly: object
    moments: tuple
    classification: Classification
    kappa: int | None
    p_uv: CPoly

    @property
    def l(self):
        return self.minpoly.l

    @property
    def is_degenerate(self):
        return self.classification is Classification.FULLY_DEGENERATE


def build_puv(minpoly, moments):
    """Coefficients of ``p_uv`` from ``m_A`` and the moments.

    With ``m_A = sum_i alpha_i lam^i`` the resolvent identity
    ``m_A(lam) (lam I - A)^{-1} = sum_j lam^j sum_{i>j} alpha_i A^{i-j-1}``
    gives ``coeff_j = sum_{i=j+1}^{l} alpha_i mu_{i-j-1}``.
    """
    alpha = minpoly.m_A.coeffs
    l = minpoly.l
    mu = np.asarray(moments[:l], dtype=complex)
    if mu.size < l:
        raise ValueError(f"need moments 0..{l - 1}, got {mu.size}")
    coeffs = np.zeros(l, dtype=complex)
    for j in range(l):
        for i in range(j + 1, l + 1):
            coeffs[j] += alpha[i] * mu[i - j - 1]
    return CPoly(coeffs)


def analyze(inst, moment_zero_tol=MOMENT_ZERO_TOL):
    """Classify ``inst`` and build ``p_uv``.

    A moment counts as zero when
    ``|v^* A^j u| <= moment_zero_tol * |v| * |A^j u|``.
    """
    mp = minimal_poly(inst.A)
    l = mp.l
    mus, norms = krylov_moments(inst.A, inst.u, inst.v, l + 1)
    vnorm = float(np.linalg.norm(inst.v))
    vanish = [abs(m) <= moment_zero_tol * vnorm * s for m, s in zip(mus, norms)]
    kappa = next((j for j in range(l) if not vanish[j]), None)
    if kappa is None:
        cleaned = tuple(0j if vanish[j] else mus[j] for j in range(l + 2))
        return PerturbationAnalysis(mp, cleaned, Classification.FULLY_DEGENERATE,
                                    None, CPoly.zero())
    cleaned = tuple(0j if j < kappa else mus[j] for j in range(l + 2))
    p_uv = build_puv(mp, cleaned)
    if p_uv.degree() != l - kappa - 1:
        raise NumericalFailure(
            f"deg p_uv = {p_uv.degree()} but l - kappa - 1 = {l - kappa - 1}")
    return PerturbationAnalysis(mp, cleaned, Classification.REGULAR, kappa, p_uv)


def principal_root(z, k):
    """Principal ``k``-th root, argument in ``(-pi/k, pi/k]``."""
    z = complex(z)
    if z == 0:
        return 0j
    return abs(z) ** (1.0 / k) * cmath.exp(1j * _principal_arg(z) / k)


def _principal_arg(z):
    # cmath.phase returns -pi on the negative real axis when imag is -0.0
    arg = cmath.phase(z)
    return math.pi if arg <= -math.pi else arg


# -- expansion at infinity --------------------------------------------------

@dataclass(frozen=True)
class PuiseuxInfinity:
    """Coefficients of the ``kappa + 1`` branches escaping to infinity.

    ``v^* A^kappa u = r exp(i theta0)``; ``c_minus1`` is its principal
    ``(kappa+1)``-th root.
    """

    kappa: int
    r: float
    theta0: float
    c_minus1: complex
    c0: complex
    c1: complex

    @property
    def branch_count(self):
        return self.kappa + 1


def infinity_expansion(analysis, moments=None):
    if analysis.is_degenerate:
        raise AnalysisUnavailable("fully degenerate instance has no escaping branches")
    mu = analysis.moments if moments is None else moments
    kappa = analysis.kappa
    K = kappa + 1
    m0, m1, m2 = (complex(mu[kappa + i]) for i in range(3))
    cm1 = principal_root(m0, K)
    theta0 = _principal_arg(m0)
    c0 = m1 / (K * m0)
    c1 = (m2 - (kappa + 2) / (2 * K) * m1 ** 2 / m0) / (K * cm1 ** (kappa + 2))
    return PuiseuxInfinity(kappa, abs(m0), theta0, cm1, c0, c1)


def _check_order(order, allowed):
    if order not in allowed:
        raise ValueError(f"order must be one of {sorted(allowed)}, got {order!r}")


def branch_point_infinity(exp, j, t, theta, order=3):
    """Truncated expansion of escaping branch ``j`` at ``tau = t e^{i theta}``.

    ``order`` 1 keeps the root term, 2 adds ``c0`` and 3 adds the
    ``c1 tau^{-1/(kappa+1)}`` correction.  ``theta`` may be an array.
    """
    K = exp.kappa + 1
    if not 1 <= j <= K:
        raise ValueError(f"branch index {j} outside 1..{K}")
    if not t > 0:
        raise ValueError("t must be positive")
    _check_order(order, {1, 2, 3})
    theta = np.asarray(theta, dtype=float)
    phase = (theta + 2 * np.pi * j) / K
    val = (t * exp.r) ** (1.0 / K) * np.exp(1j * ((theta + exp.theta0) / K + 2 * np.pi * j / K))
    if order >= 2:
        val = val + exp.c0
    if order >= 3:
        val = val + exp.c1 * t ** (-1.0 / K) * np.exp(-1j * phase)
    return val[()] if val.ndim == 0 else val


# -- finite limit points ----------------------------------------------------

@dataclass(frozen=True)
class FiniteCluster:
    """A root ``zeta`` of ``p_uv`` with multiplicity ``k``.

    When ``zeta`` is also an eigenvalue of ``A`` the expansion does not
    apply: ``collides_with_mA`` is set and the moment and ``b`` fields are
    ``None``.
    """

    cluster_id: int
    zeta: complex
    k: int
    collides_with_mA: bool
    a_k1: complex | None = None
    a_k2: complex | None = None
    b1: complex | None = None
    b2: complex | None = None
    member_roots: tuple = ()


def b1_coefficient(a_k1, k):
    """Principal ``k``-th root of ``1 / a_{k+1}``."""
    return principal_root(1.0 / complex(a_k1), k)


def b2_direct(b1, a_k1, a_k2, k):
    return -(b1 ** 2) * a_k2 / (k * a_k1)


def b2_alternative(a_k1, a_k2, k, b1):
    """``-(1/k) a_{k+2} / a_{k+1}^{1+2/k}`` on the root branch fixed by ``b1``.

    The fractional power is evaluated through the logarithm, choosing the
    branch of ``a_{k+1}^{1/k}`` that equals ``1 / b1``.
    """
    a = complex(a_k1)
    ln_abs, arg = math.log(abs(a)), cmath.phase(a)
    target = 1.0 / b1
    m = min(range(k), key=lambda m: abs(cmath.exp((ln_abs + 1j * (arg + 2 * math.pi * m)) / k) - target))
    power = cmath.exp((1 + 2.0 / k) * (ln_abs + 1j * (arg + 2 * math.pi * m)))
    return -a_k2 / (k * power)


def finite_clusters(inst, analysis, cluster_tol=None):
    """Clusters of roots of ``p_uv`` with their ``b`` coefficients.

    Clusters are ordered by decreasing real part (then imaginary part) and
    numbered from 1.
    """
    if analysis.is_degenerate:
        raise AnalysisUnavailable("fully degenerate instance has no finite limit points")
    if analysis.p_uv.degree() < 1:
        return []
    roots = poly_roots(analysis.p_uv)
    groups = sorted(cluster_roots(roots, cluster_tol),
                    key=lambda c: (-c.center.real, -c.center.imag))
    vnorm = float(np.linalg.norm(inst.v))
    out = []
    for idx, grp in enumerate(groups, start=1):
        k = grp.multiplicity
        zeta = refine_multiple_root(analysis.p_uv, grp.center, k)
        if collides_with_spectrum(inst.A, analysis.minpoly, zeta):
            out.append(FiniteCluster(idx, zeta, k, True, member_roots=grp.member_roots))
            continue
        a = resolvent_moments(inst.A, inst.u, inst.v, zeta, k + 2)
        a_k1, a_k2 = a[k], a[k + 1]
        scale = vnorm * np.linalg.norm(inst.u) * max(abs(x) for x in a) + 1e-300
        if abs(a_k1) <= A_NONZERO_TOL * scale:
            raise NumericalFailure(
                f"a_{k + 1}({zeta}) vanishes; multiplicity {k} looks wrong")
        b1 = b1_coefficient(a_k1, k)
        b2 = b2_direct(b1, a_k1, a_k2, k)
        out.append(FiniteCluster(idx, zeta, k, False, a_k1, a_k2, b1, b2, grp.member_roots))
    return out


def refine_multiple_root(p, z0, k, steps=4):
    """Newton-refine a ``k``-fold root of ``p`` as a simple root of ``p^{(k-1)}``.

    The mean of a cluster of computed roots is only as accurate as the
    iteration that produced them; the ``(k-1)``-th derivative has a simple,
    well-conditioned root at the same point.
    """
    q = p
    for _ in range(k - 1):
        q = poly_derivative(q)
    dq = poly_derivative(q)
    z = complex(z0)
    fz = abs(q(z))
    for _ in range(steps):
        d = dq(z)
        if d == 0:
            break
        cand = z - q(z) / d
        fc = abs(q(cand))
        if not fc < fz:
            break
        z, fz = complex(cand), fc
    return z


def gamma_finite(cluster, j, t, theta, order=2):
    """Truncated expansion of branch ``j`` near ``cluster.zeta``.

    ``zeta - b1 s - b2 s**2`` with ``s = tau^{-1/k}`` on branch ``j``,
    i.e. ``s = t^{-1/k} exp(-i (theta + 2 pi j) / k)``.
    """
    if cluster.collides_with_mA:
        raise AnalysisUnavailable(
            f"cluster at {cluster.zeta} collides with an eigenvalue of A")
    k = cluster.k
    if not 1 <= j <= k:
        raise ValueError(f"branch index {j} outside 1..{k}")
    if not t > 0:
        raise ValueError("t must be positive")
    _check_order(order, {1, 2})
    theta = np.asarray(theta, dtype=float)
    s = t ** (-1.0 / k) * np.exp(-1j * (theta + 2 * np.pi * j) / k)
    val = cluster.zeta - cluster.b1 * s
    if order >= 2:
        val = val - cluster.b2 * s ** 2
    return val[()] if val.ndim == 0 else val


def multiplicity_at(inst, lam0, tau0, max_mult=None):
    """Multiplicity of ``lam0`` as an eigenvalue of ``B(tau0)``.

    Zero when ``tau0 Q(lam0) != 1``; otherwise the order of the first
    non-vanishing derivative of ``Q``, capped at ``max_mult``.
    """
    if tau0 == 0:
        raise ValueError("tau0 must be nonzero")
    if max_mult is None:
        max_mult = inst.n
    a = resolvent_moments(inst.A, inst.u, inst.v, lam0, max_mult + 1)
    if abs(tau0 * a[0] - 1) > CRIT_TOL:
        return 0
    tol = DERIVATIVE_TOL / (1 + abs(lam0))
    for m in range(1, max_mult + 1):
        q_m = (-1) ** m * math.factorial(m) * a[m]
        if abs(q_m) > tol:
            return m
    return max_mult
