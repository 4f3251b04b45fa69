import numpy as np
import pytest

from rankone.errors import NumericalFailure
from rankone.poly import (
    CPoly,
    cluster_roots,
    default_cluster_tol,
    poly_combine,
    poly_derivative,
    poly_divide,
    poly_eval,
    poly_roots,
)


def test_trailing_zeros_dropped_and_read_only():
    assert CPoly([1, 2, 0, 0]).degree() == 1
    # a tiny leading coefficient is data, not noise
    assert CPoly([1e20, 1]).degree() == 1
    p = CPoly([1, 2])
    with pytest.raises(ValueError):
        p.coeffs[0] = 5


def test_zero_polynomial():
    z = CPoly.zero()
    assert z.is_zero and z.degree() == -1
    assert CPoly([0, 0]).is_zero
    assert (z * CPoly([1, 1])).is_zero


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        CPoly([1, np.nan])


def test_evaluation_scalar_and_array():
    p = CPoly([1, 0, 2])  # 1 + 2 z^2
    assert p(2) == 9
    np.testing.assert_allclose(poly_eval(p, np.array([0, 1j])), [1, -1])


def test_arithmetic():
    p, q = CPoly([1, 1]), CPoly([-1, 1])
    assert (p * q).allclose(CPoly([-1, 0, 1]))
    assert (p + q).allclose(CPoly([0, 2]))
    assert (p - q).allclose(CPoly([2]))
    assert (CPoly([1, 1 + 1e-16]) - CPoly([0, 1])).degree() == 0
    assert (2 * p).allclose([2, 2])
    assert (-p).allclose([-1, -1])
    assert (1 - p).allclose([0, -1])
    assert poly_combine(p, None, "scale", c=1j).allclose([1j, 1j])
    with pytest.raises(ValueError):
        poly_combine(p, q, "pow")


def test_derivative():
    assert poly_derivative(CPoly([5, 3, 0, 2])).allclose([3, 0, 6])
    assert poly_derivative(CPoly([7])).is_zero


def test_division_exact_and_with_remainder():
    q, r = poly_divide(CPoly([-1, 0, 1]), CPoly([1, 1]))
    assert q.allclose([-1, 1]) and r.is_zero
    q, r = divmod(CPoly([1, 0, 1]), CPoly([1, 1]))
    assert q.allclose([-1, 1]) and r.allclose([2])
    assert (CPoly([1, 2]) // CPoly([1, 0, 1])).is_zero
    with pytest.raises(ValueError):
        poly_divide(CPoly([1]), CPoly.zero())


def test_from_roots_round_trip():
    roots = [1, -2j, 3 + 1j]
    p = CPoly.from_roots(roots, leading=2)
    assert p.leading == 2
    got = sorted(poly_roots(p), key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, sorted(roots, key=lambda z: (complex(z).real, complex(z).imag)),
                               atol=1e-12)


def test_roots_of_constant_raise():
    with pytest.raises(ValueError):
        poly_roots(CPoly([3]))


def test_zero_roots_are_exact():
    r = poly_roots(CPoly([0, 0, 1, 1]))
    assert r.count(0j) == 2
    assert any(abs(z + 1) < 1e-14 for z in r)


def test_roots_random_reconstruction():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(1, 9))
        c = rng.normal(size=m + 1) + 1j * rng.normal(size=m + 1)
        p = CPoly(c)
        q = CPoly.from_roots(poly_roots(p), leading=p.leading)
        worst = max(worst, np.max(np.abs(q.coeffs - p.coeffs)) / np.max(np.abs(p.coeffs)))
    assert worst < 1e-10


def test_nonconvergence_reports_best_iterate():
    p = CPoly.from_roots([1, 2, 3, 4])
    with pytest.raises(NumericalFailure) as info:
        poly_roots(p, max_iters=1)
    assert info.value.best is not None and len(info.value.best) == 4


def test_double_root_clusters():
    p = CPoly.from_roots([1, 1, -2])
    cl = cluster_roots(poly_roots(p))
    mult = sorted(c.multiplicity for c in cl)
    assert mult == [1, 2]
    double = next(c for c in cl if c.multiplicity == 2)
    assert abs(double.center - 1) < 1e-6


def test_cluster_tolerance():
    assert default_cluster_tol([0j]) == 1e-8
    assert default_cluster_tol([1e6]) == pytest.approx(1.0)
    cl = cluster_roots([0, 0.5, 1.0], cluster_tol=0.6)  # single linkage chains
    assert len(cl) == 1 and cl[0].multiplicity == 3
    with pytest.raises(ValueError):
        cluster_roots([1], cluster_tol=0)
