"""Dense complex polynomials and a simultaneous root finder.

Coefficients are stored in ascending order, ``coeffs[j]`` multiplying
``lam**j``.  Roots are found with the Aberth-Ehrlich iteration rather than
companion-matrix eigenvalues, so that the eigenvalue oracle built on top of
this module never calls an eigenvalue routine.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure

__all__ = [
    "CPoly",
    "RootCluster",
    "poly_eval",
    "poly_derivative",
    "poly_combine",
    "poly_divide",
    "poly_roots",
    "cluster_roots",
    "default_cluster_tol",
]

ZERO_COEFF_RTOL = 1e-14
RESIDUAL_TOL = 1e-12
MAX_ITERS = 200
POLISH_STEPS = 3
# fixed irrational angular offset for the initial guesses (radians)
_ANGLE_OFFSET = (np.sqrt(5.0) - 1.0) / 2.0


def _strip(c, scale=None):
    """Drop high-order coefficients that are zero relative to ``scale``."""
    c = np.asarray(c, dtype=complex)
    if c.size == 0:
        return c
    if scale is None:
        scale = np.max(np.abs(c))
    if scale == 0:
        return c[:0]
    thresh = ZERO_COEFF_RTOL * scale
    n = c.size
    while n > 0 and abs(c[n - 1]) <= thresh:
        n -= 1
    return c[:n]


@dataclass(frozen=True, eq=False)
class CPoly:
    """Complex polynomial given by ascending coefficients.

    Trailing exact zeros are dropped, so the zero polynomial has an empty
    coefficient array and degree -1.  Instances are immutable; arithmetic
    returns new objects.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))

    def __post_init__(self):
        c = np.atleast_1d(np.array(self.coeffs, dtype=complex))
        if c.ndim != 1:
            raise ValueError("coefficients must form a 1-D sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[:nz[-1] + 1].copy() if nz.size else c[:0].copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls):
        return cls(np.zeros(0, complex))

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)

    def degree(self):
        return self.coeffs.size - 1

    @property
    def is_zero(self):
        return self.coeffs.size == 0

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs.size else 0j

    def monic(self):
        if self.is_zero:
            raise ValueError("the zero polynomial has no monic form")
        return CPoly(self.coeffs / self.coeffs[-1])

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        return poly_combine(self, _as_poly(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return poly_combine(self, _as_poly(other), "sub")

    def __rsub__(self, other):
        return poly_combine(_as_poly(other), self, "sub")

    def __mul__(self, other):
        if isinstance(other, CPoly):
            return poly_combine(self, other, "mul")
        return poly_combine(self, None, "scale", c=other)

    __rmul__ = __mul__

    def __neg__(self):
        return poly_combine(self, None, "scale", c=-1.0)

    def __divmod__(self, other):
        return poly_divide(self, other)

    def __floordiv__(self, other):
        return poly_divide(self, other)[0]

    def __mod__(self, other):
        return poly_divide(self, other)[1]

    def allclose(self, other, atol=1e-12, rtol=0.0):
        """Coefficient-wise comparison, padding the shorter array with zeros."""
        a, b = self.coeffs, _as_poly(other).coeffs
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    def __repr__(self):
        return f"CPoly({np.array2string(self.coeffs, precision=6)})"


def _as_poly(p):
    if isinstance(p, CPoly):
        return p
    if np.ndim(p) == 1:
        return CPoly(p)
    return CPoly.constant(p)


def poly_eval(p, z):
    """Evaluate ``p`` at ``z`` (scalar or array) by Horner's scheme."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in p.coeffs[::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def _horner2(c, z):
    """Value and first derivative of the polynomial ``c`` at ``z``."""
    val = np.zeros_like(z)
    der = np.zeros_like(z)
    for a in c[::-1]:
        der = der * z + val
        val = val * z + a
    return val, der


def poly_derivative(p):
    if p.degree() < 1:
        return CPoly.zero()
    j = np.arange(1, p.coeffs.size)
    return CPoly(p.coeffs[1:] * j)


def poly_combine(p, q, kind, c=None):
    """Add, subtract, multiply or scale polynomials.

    ``kind`` is one of ``"add"``, ``"sub"``, ``"mul"`` or ``"scale"``; for
    ``"scale"`` the second operand is ignored and ``p`` is multiplied by ``c``.
    """
    if kind == "scale":
        return CPoly(p.coeffs * complex(c))
    a, b = p.coeffs, q.coeffs
    if kind == "mul":
        if a.size == 0 or b.size == 0:
            return CPoly.zero()
        return CPoly(np.convolve(a, b))
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    if kind not in ("add", "sub"):
        raise ValueError(f"unknown combination kind {kind!r}")
    c = a + b if kind == "add" else a - b
    # leading terms that cancel to rounding level are dropped
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    return CPoly(_strip(c, scale=scale))


def poly_divide(p, q):
    """Long division ``p = q * quotient + remainder``.

    Remainder coefficients that are zero relative to the scale of ``p``
    are dropped, so exact divisions yield the zero polynomial.
    """
    if q.is_zero:
        raise ValueError("division by the zero polynomial")
    dp, dq = p.degree(), q.degree()
    if dp < dq:
        return CPoly.zero(), p
    rem = p.coeffs.astype(complex).copy()
    quot = np.zeros(dp - dq + 1, dtype=complex)
    lead = q.coeffs[-1]
    for i in range(dp - dq, -1, -1):
        f = rem[i + dq] / lead
        quot[i] = f
        rem[i:i + dq + 1] -= f * q.coeffs
    scale = np.max(np.abs(p.coeffs))
    rem = _strip(rem[:dq], scale=scale) if dq > 0 else rem[:0]
    return CPoly(quot), CPoly(rem)


def _initial_guesses(c):
    """Roots of unity scaled by the Fujiwara bound of the monic ``c``."""
    m = c.size - 1
    terms = [abs(c[m - k]) ** (1.0 / k) for k in range(1, m)]
    terms.append(abs(c[0] / 2.0) ** (1.0 / m))
    radius = 2.0 * max(terms)
    if radius == 0.0:
        radius = 1.0
    k = np.arange(m)
    return radius * np.exp(1j * (2.0 * np.pi * k / m + _ANGLE_OFFSET))


def poly_roots(p, residual_tol=RESIDUAL_TOL, max_iters=MAX_ITERS,
               polish_steps=POLISH_STEPS):
    """All ``deg(p)`` roots of ``p``, repeated according to multiplicity.

    Simultaneous Aberth-Ehrlich iteration from perturbed-circle starting
    points, followed by a few Newton steps on the original polynomial.
    A root is accepted once ``|p(z)| / sum_j |c_j| |z|^j <= residual_tol``.

    Raises
    ------
    ValueError
        If ``p`` is constant.
    NumericalFailure
        If the iteration does not converge within ``max_iters``; the
        exception carries the last iterate and its relative residuals.
    """
    if p.degree() < 1:
        raise ValueError("root finding needs a polynomial of degree >= 1")
    c = p.coeffs
    nz = int(np.argmax(c != 0))
    zero_roots = [0j] * nz
    c = c[nz:] / c[-1]
    m = c.size - 1
    if m == 0:
        return zero_roots
    if m == 1:
        return zero_roots + [complex(-c[0])]

    absc = np.abs(c)
    z = _initial_guesses(c)
    done = np.zeros(m, dtype=bool)
    resid = np.full(m, np.inf)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(max_iters):
            val, der = _horner2(c, z)
            scale = np.zeros(m)
            for a in absc[::-1]:
                scale = scale * np.abs(z) + a
            resid = np.abs(val) / scale
            done = resid <= residual_tol
            if done.all():
                break
            ratio = val / der
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
            bad = ~np.isfinite(w)
            if bad.any():
                # vanishing derivative or coincident iterates: nudge and retry
                w[bad] = 1e-3 * (1.0 + np.abs(z[bad])) * np.exp(1j * _ANGLE_OFFSET)
            z = np.where(done, z, z - w)
        else:
            raise NumericalFailure(
                f"Aberth iteration did not converge in {max_iters} steps",
                best=z.copy(), residuals=resid.copy())

        for _ in range(polish_steps):
            val, der = _horner2(c, z)
            step = val / der
            cand = z - step
            cval, _ = _horner2(c, cand)
            better = np.isfinite(cand) & (np.abs(cval) < np.abs(val))
            z = np.where(better, cand, z)

    return zero_roots + [complex(r) for r in z]


@dataclass(frozen=True)
class RootCluster:
    """Numerically coincident roots merged into one multiple root."""

    center: complex
    multiplicity: int
    member_roots: tuple


def default_cluster_tol(roots):
    scale = max((abs(r) for r in roots), default=0.0)
    return max(1e-8, 1e-6 * scale)


def cluster_roots(roots, cluster_tol=None):
    """Single-linkage clustering of ``roots`` at threshold ``cluster_tol``.

    Clusters are returned in order of their first member in ``roots``.
    """
    roots = [complex(r) for r in roots]
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(roots)
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= cluster_tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    out = []
    for members in groups.values():
        center = complex(np.mean(members))
        out.append(RootCluster(center, len(members), tuple(members)))
    return out
