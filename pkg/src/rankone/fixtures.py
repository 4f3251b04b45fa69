"""Reference instances: the three worked examples, edge cases, random draws."""
from __future__ import annotations

import numpy as np

from .perturb import ProblemInstance

__all__ = [
    "example_collision",
    "example_generic",
    "example_kappa_one",
    "degenerate_nilpotent",
    "scalar_identity",
    "random_instance",
]


def example_collision():
    """``A = diag(1, 0.5, 1.5)``, ``u = v = (0, 1, 1)``: ``p_uv = 2 (lam - 1)^2``
    shares its root with ``m_A``."""
    return ProblemInstance(np.diag([1.0, 0.5, 1.5]), [0, 1, 1], [0, 1, 1],
                           label="collision (root of p_uv in sigma(A))")


def example_generic():
    """``A = diag(-1, 0, 1)``, ``u = (1, 1, 1)``, ``v = (1, 2, 3)``."""
    return ProblemInstance(np.diag([-1.0, 0.0, 1.0]), [1, 1, 1], [1, 2, 3],
                           label="generic (kappa = 0)")


def example_kappa_one():
    """Same ``A`` and ``u`` as :func:`example_generic`, ``v = (1, -1/2, -1/2)``."""
    return ProblemInstance(np.diag([-1.0, 0.0, 1.0]), [1, 1, 1], [1, -0.5, -0.5],
                           label="kappa-one (kappa = 1)")


def degenerate_nilpotent():
    return ProblemInstance(np.zeros((2, 2)), [1, 0], [0, 1], label="nilpotent")


def scalar_identity():
    """1x1 instance with ``B(tau) = tau`` exactly."""
    return ProblemInstance([[0.0]], [1.0], [1.0], label="scalar")


def _unit_disc(rng, shape):
    r = np.sqrt(rng.uniform(size=shape))
    return r * np.exp(2j * np.pi * rng.uniform(size=shape))


def random_instance(rng, n, kappa=0):
    """Random instance with unit-disc entries and prescribed index ``kappa``.

    ``v`` is projected off ``u, A u, ..., A^{kappa-1} u`` so that the first
    ``kappa`` moments vanish.
    """
    A = _unit_disc(rng, (n, n))
    u = _unit_disc(rng, n)
    v = _unit_disc(rng, n)
    if kappa:
        K = np.column_stack([np.linalg.matrix_power(A, j) @ u for j in range(kappa)])
        Q, _ = np.linalg.qr(K)
        v = v - Q @ (Q.conj().T @ v)
    return ProblemInstance(A, u, v, label=f"random n={n} kappa={kappa}")
