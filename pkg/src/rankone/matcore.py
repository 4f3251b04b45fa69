"""Dense complex matrix kernel.

Linear solves, characteristic and minimal polynomials, the Krylov moments
``v^* A^j u`` and the resolvent moments ``a_m(z) = v^* (z I - A)^{-m} u``.

The characteristic polynomial is computed with the Faddeev-LeVerrier
recursion in exact arithmetic: every finite float is a dyadic rational, so
after a common power-of-two scaling the matrix has Gaussian-integer entries
and the recursion (whose divisions by ``k`` are exact for integer matrices)
runs on Python integers.  Only the final coefficients are rounded.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .errors import EigenvalueCollisionError, NumericalFailure, SingularMatrixError
from .poly import CPoly, poly_divide

__all__ = [
    "as_cmatrix",
    "as_cvector",
    "LUFactor",
    "lu_factor",
    "lu_solve",
    "char_poly",
    "char_poly_exact",
    "rank_one_update_exact",
    "MinimalPolyInfo",
    "minimal_poly",
    "moment",
    "moments",
    "resolvent_moment",
    "resolvent_moments",
    "q_derivative",
    "collides_with_spectrum",
]

PIVOT_RATIO_TOL = 1e-12
MINPOLY_RANK_TOL = 1e-9
MINPOLY_VALUE_TOL = 1e-9


def as_cmatrix(A):
    """Validate and copy ``A`` as a read-only square complex array."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    M.flags.writeable = False
    return M


def as_cvector(x, n=None):
    x = np.array(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {x.shape}")
    if n is not None and x.size != n:
        raise ValueError(f"vector has length {x.size}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    x.flags.writeable = False
    return x


# -- LU ---------------------------------------------------------------------

@dataclass(frozen=True)
class LUFactor:
    """Partial-pivoting LU factors of a square matrix."""

    lu: np.ndarray
    piv: np.ndarray
    pivot_ratio: float

    @property
    def singular(self):
        return self.pivot_ratio < PIVOT_RATIO_TOL

    def solve(self, b):
        if self.singular:
            raise SingularMatrixError(
                f"matrix is singular to working precision "
                f"(pivot ratio {self.pivot_ratio:.3e})")
        return sla.lu_solve((self.lu, self.piv), np.asarray(b, dtype=complex))


def lu_factor(M):
    M = np.asarray(M, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    d = np.abs(np.diag(lu))
    dmax = d.max()
    ratio = float(d.min() / dmax) if dmax > 0 else 0.0
    lu.flags.writeable = False
    return LUFactor(lu, piv, ratio)


def lu_solve(M, b):
    """Solve ``M x = b``; raises :class:`SingularMatrixError` on a dead pivot."""
    fac = M if isinstance(M, LUFactor) else lu_factor(M)
    return fac.solve(b)


# -- characteristic polynomial ---------------------------------------------

def _gaussian_scale(entries):
    """Common power-of-two denominator for an iterable of (re, im) Fractions."""
    den = 1
    for re, im in entries:
        den = max(den, re.denominator, im.denominator)
    return den


def char_poly_exact(entries):
    """Characteristic polynomial of an exactly given dyadic-rational matrix.

    ``entries`` is an ``n x n`` nested sequence of ``(re, im)`` pairs of
    :class:`fractions.Fraction` whose denominators are powers of two.
    """
    n = len(entries)
    flat = [e for row in entries for e in row]
    D = _gaussian_scale(flat)
    Ar = np.empty((n, n), dtype=object)
    Ai = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            re, im = entries[i][j]
            Ar[i, j] = int(re * D)
            Ai[i, j] = int(im * D)

    # Faddeev-LeVerrier on the Gaussian-integer matrix D*A
    cr = [0] * (n + 1)
    ci = [0] * (n + 1)
    cr[n] = 1
    Mr = np.zeros((n, n), dtype=object)
    Mi = np.zeros((n, n), dtype=object)
    for k in range(1, n + 1):
        Nr = Ar.dot(Mr) - Ai.dot(Mi)
        Ni = Ar.dot(Mi) + Ai.dot(Mr)
        for i in range(n):
            Nr[i, i] += cr[n - k + 1]
            Ni[i, i] += ci[n - k + 1]
        Mr, Mi = Nr, Ni
        tr_r = sum(Ar[i, :].dot(Mr[:, i]) - Ai[i, :].dot(Mi[:, i]) for i in range(n))
        tr_i = sum(Ar[i, :].dot(Mi[:, i]) + Ai[i, :].dot(Mr[:, i]) for i in range(n))
        if tr_r % k or tr_i % k:
            raise NumericalFailure("inexact division in Faddeev-LeVerrier recursion")
        cr[n - k] = -(tr_r // k)
        ci[n - k] = -(tr_i // k)

    coeffs = np.empty(n + 1, dtype=complex)
    for j in range(n + 1):
        scale = D ** (n - j)
        coeffs[j] = complex(float(Fraction(cr[j], scale)), float(Fraction(ci[j], scale)))
    return CPoly(coeffs)


def _exact_entries(A):
    return [[(Fraction(z.real), Fraction(z.imag)) for z in row] for row in np.asarray(A)]


def char_poly(A):
    """Monic ``det(lam I - A)`` by exact Faddeev-LeVerrier."""
    return char_poly_exact(_exact_entries(as_cmatrix(A)))


def rank_one_update_exact(A, u, v, tau):
    """Entries of ``A + tau u v^*`` as exact dyadic ``(re, im)`` Fractions."""
    tr, ti = Fraction(complex(tau).real), Fraction(complex(tau).imag)
    us = [(Fraction(z.real), Fraction(z.imag)) for z in np.asarray(u, dtype=complex)]
    # conjugate of v
    vs = [(Fraction(z.real), -Fraction(z.imag)) for z in np.asarray(v, dtype=complex)]
    out = []
    for i, row in enumerate(np.asarray(A, dtype=complex)):
        ur, ui = us[i]
        # tau * u_i
        sr, si = tr * ur - ti * ui, tr * ui + ti * ur
        new = []
        for j, a in enumerate(row):
            vr, vi = vs[j]
            new.append((Fraction(a.real) + sr * vr - si * vi,
                        Fraction(a.imag) + sr * vi + si * vr))
        out.append(new)
    return out


# -- minimal polynomial ----------------------------------------------------

@dataclass(frozen=True)
class MinimalPolyInfo:
    """Minimal and characteristic polynomial of a matrix.

    ``quotient`` is ``char_A / m_A``; its roots are the eigenvalues of ``A``
    that keep their extra multiplicity under any rank-one perturbation.
    """

    m_A: CPoly
    l: int
    char_A: CPoly
    quotient: CPoly


def minimal_poly(A, rank_tol=MINPOLY_RANK_TOL):
    """Smallest-degree monic polynomial annihilating ``A``.

    Vectorized powers ``I, A, A^2, ...`` (each normalized to unit length)
    are stacked as columns; the first power that a column-pivoted QR finds
    numerically dependent on its predecessors fixes the degree, and the
    coefficients come from a least-squares solve.
    """
    A = as_cmatrix(A)
    n = A.shape[0]
    char_A = char_poly(A)
    cols, norms = [], []
    P = np.eye(n, dtype=complex)
    for d in range(n + 1):
        if d > 0:
            P = A @ P
        s = np.linalg.norm(P)
        norms.append(s)
        cols.append(P.ravel() / s if s > 0 else P.ravel())
        if d == 0:
            continue
        if d == n:
            # nothing of lower degree annihilates A: m_A is the exact char_A
            return MinimalPolyInfo(char_A, n, char_A, CPoly.constant(1.0))
        if s == 0:
            alpha = np.zeros(d, dtype=complex)
        else:
            K = np.column_stack(cols)
            R = sla.qr(K, mode="r", pivoting=True)[0]
            diag = np.abs(np.diag(R))
            rank = int(np.sum(diag > rank_tol * diag[0]))
            if rank > d:
                continue
            y = np.linalg.lstsq(K[:, :d], -K[:, d], rcond=None)[0]
            alpha = y * s / np.asarray(norms[:d])
        m_A = CPoly(np.append(alpha, 1.0))
        quotient, _ = poly_divide(char_A, m_A)
        return MinimalPolyInfo(m_A, d, char_A, quotient)
    raise NumericalFailure(
        "no linear dependence among powers of A up to degree n; "
        "try a looser rank tolerance")


# -- moments ---------------------------------------------------------------

def moment(A, u, v, j):
    """``v^* A^j u`` by ``j`` matrix-vector products."""
    w = np.asarray(u, dtype=complex)
    for _ in range(j):
        w = A @ w
    return complex(np.vdot(v, w))


def moments(A, u, v, jmax):
    """Moments ``v^* A^j u`` for ``j = 0..jmax`` and the norms ``|A^j u|``."""
    w = np.asarray(u, dtype=complex)
    mus, norms = [], []
    for j in range(jmax + 1):
        if j:
            w = A @ w
        mus.append(complex(np.vdot(v, w)))
        norms.append(float(np.linalg.norm(w)))
    return mus, norms


def _shifted_factor(A, zeta):
    n = A.shape[0]
    fac = lu_factor(zeta * np.eye(n) - A)
    if fac.singular:
        raise EigenvalueCollisionError(
            f"zeta = {zeta} is numerically an eigenvalue of A "
            f"(pivot ratio {fac.pivot_ratio:.3e})")
    return fac


def resolvent_moments(A, u, v, zeta, mmax):
    """``[a_1(zeta), ..., a_mmax(zeta)]`` from one LU factorization."""
    fac = _shifted_factor(np.asarray(A, dtype=complex), complex(zeta))
    x = np.asarray(u, dtype=complex)
    out = []
    for _ in range(mmax):
        x = fac.solve(x)
        out.append(complex(np.vdot(v, x)))
    return out


def resolvent_moment(A, u, v, zeta, m):
    """``a_m(zeta) = v^* (zeta I - A)^{-m} u`` for ``m >= 1``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return resolvent_moments(A, u, v, zeta, m)[-1]


def q_derivative(A, u, v, lam0, m):
    """m-th derivative of ``Q(lam) = v^* (lam I - A)^{-1} u`` at ``lam0``."""
    return (-1) ** m * math.factorial(m) * resolvent_moment(A, u, v, lam0, m + 1)


def collides_with_spectrum(A, minpoly, zeta):
    """Whether ``zeta`` is numerically an eigenvalue of ``A``.

    Two tests must agree: a dead LU pivot of ``zeta I - A`` and a tiny
    value of the minimal polynomial at ``zeta``.
    """
    A = np.asarray(A, dtype=complex)
    fac = lu_factor(zeta * np.eye(A.shape[0]) - A)
    by_pivot = fac.singular
    by_poly = abs(minpoly.m_A(zeta)) < MINPOLY_VALUE_TOL * (1 + abs(zeta)) ** minpoly.l
    if by_pivot != by_poly:
        raise NumericalFailure(
            f"collision tests disagree at zeta = {zeta}: pivot ratio "
            f"{fac.pivot_ratio:.3e}, |m_A(zeta)| = {abs(minpoly.m_A(zeta)):.3e}")
    return by_pivot
