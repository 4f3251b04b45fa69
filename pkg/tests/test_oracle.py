import cmath
import dataclasses

import numpy as np
import pytest

from rankone import fixtures
from rankone.errors import ConsistencyError
from rankone.oracle import (
    analytic_branches,
    approx_error,
    convergence_order,
    cycle_lengths,
    determinant_cross_check,
    expected_cycle_lengths,
    fit_exponent,
    fit_expansion_coefficient,
    matching_distance,
    monodromy_check,
    predicted_exponent,
    spectrum_A,
    spectrum_B,
    sweep,
    track_continuity,
)
from rankone.perturb import analyze, finite_clusters, infinity_expansion


def test_spectrum_scalar(scalar):
    np.testing.assert_allclose(spectrum_B(scalar, 3 + 4j), [3 + 4j])


def test_spectrum_nilpotent(nilpotent):
    np.testing.assert_array_equal(spectrum_B(nilpotent, 7), [0, 0])


def test_spectrum_collision_keeps_one(collision):
    eig = spectrum_B(collision, cmath.exp(1j * np.pi / 3))
    assert np.min(np.abs(eig - 1)) < 1e-8


def test_spectrum_A(generic):
    np.testing.assert_allclose(spectrum_A(generic), [-1, 0, 1], atol=1e-14)


def test_matching_distance():
    assert matching_distance([1, 2], [2, 1 + 1e-3]) == pytest.approx(1e-3)
    assert matching_distance([1], [1, 2]) == np.inf
    assert matching_distance([], []) == 0


@pytest.mark.parametrize("tau", [1, -1, 1j, 10, 100 * cmath.exp(1j * np.pi / 5)])
def test_cross_check_generic(generic, tau):
    an = analyze(generic)
    got = determinant_cross_check(generic, tau, an)
    assert matching_distance(got, spectrum_B(generic, tau)) < 1e-8


def test_cross_check_degenerate_is_identity(nilpotent):
    an = analyze(nilpotent)
    np.testing.assert_array_equal(determinant_cross_check(nilpotent, 5, an), [0, 0])


def test_cross_check_detects_corruption(generic):
    an = analyze(generic)
    bad = dataclasses.replace(an, p_uv=an.p_uv * 1.001)
    with pytest.raises(ConsistencyError):
        determinant_cross_check(generic, 1.0, bad)


def test_sweep_generic(generic):
    sw = sweep(generic, 1.0, 200)
    assert sw.steps == 200 and sw.tracks.shape == (3, 200)
    assert sw.persistent == ()
    assert sw.thetas[0] == pytest.approx(2 * np.pi / 200)
    assert sw.thetas[-1] == pytest.approx(2 * np.pi)
    assert sw.monodromy == (0, 1, 2)
    assert track_continuity(sw, generic)
    big = np.argmax(np.abs(sw.tracks[:, 0]))
    ref = 1 / 3 + 6 * np.exp(1j * sw.thetas)
    assert np.max(np.abs(sw.tracks[big] - ref)) < 0.5


def test_sweep_collision(collision):
    sw = sweep(collision, 1.0, 200)
    assert len(sw.persistent) == 1 and abs(sw.persistent[0] - 1) < 1e-7
    assert sw.tracks.shape[0] == 2
    assert np.max(np.abs(sw.persistent_tracks - 1)) < 1e-7
    an = analyze(collision)
    cl = finite_clusters(collision, an)
    # the colliding double root does not produce a 2-cycle: one eigenvalue is pinned
    assert expected_cycle_lengths(an, cl) == [1, 2]
    assert not monodromy_check(sw, expected_cycle_lengths(an, cl))
    assert cycle_lengths(sw.monodromy) == [1, 1]


def test_sweep_scalar_is_circle(scalar):
    sw = sweep(scalar, 2.5, 16)
    np.testing.assert_allclose(sw.tracks[0], 2.5 * np.exp(1j * sw.thetas), atol=1e-13)
    assert sw.monodromy == (0,)


def test_sweep_degenerate_all_persistent(nilpotent):
    sw = sweep(nilpotent, 1.0, 8)
    assert sw.tracks.shape == (0, 8) and len(sw.persistent) == 2
    assert sw.monodromy == ()


def test_cardinality_invariant(rng):
    for _ in range(5):
        inst = fixtures.random_instance(rng, 4)
        sw = sweep(inst, 3.0, 32)
        assert sw.tracks.shape[0] + len(sw.persistent) == inst.n


def test_sweep_is_deterministic(kappa_one):
    a, b = sweep(kappa_one, 4.0, 64), sweep(kappa_one, 4.0, 64)
    assert np.array_equal(a.tracks, b.tracks) and a.monodromy == b.monodromy


def test_sweep_argument_checks(generic):
    with pytest.raises(ValueError):
        sweep(generic, 1.0, 4)
    with pytest.raises(ValueError):
        sweep(generic, 0.0, 16)


def test_monodromy_kappa_one(kappa_one):
    sw = sweep(kappa_one, 4.0, 200)
    an = analyze(kappa_one)
    assert cycle_lengths(sw.monodromy) == [1, 2]
    assert monodromy_check(sw, expected_cycle_lengths(an, finite_clusters(kappa_one, an)))


def test_cycle_lengths():
    assert cycle_lengths((1, 2, 0, 3)) == [1, 3]
    assert cycle_lengths(()) == []


def test_analytic_branches_skip_collisions(collision):
    an = analyze(collision)
    br = analytic_branches(infinity_expansion(an), finite_clusters(collision, an), 2)
    assert [b.branch_id for b in br] == ["inf-1"]


def test_approx_error_generic(generic):
    an = analyze(generic)
    r1 = approx_error(generic, an, 1.0, order=1)
    r2 = approx_error(generic, an, 1.0, order=2)
    assert r1.for_target("cluster-1")[0].max_error < 5e-3
    assert r2.for_target("infinity")[0].max_error < r1.for_target("infinity")[0].max_error
    assert r1.unassigned_tracks == ()
    for b in r1.branches:
        assert 0 <= b.mean_error <= b.max_error


def test_approx_error_scalar_exact(scalar):
    an = analyze(scalar)
    for t in (0.5, 7.0):
        rep = approx_error(scalar, an, t, steps=32, order=3)
        assert rep.branches[0].max_error < 1e-12


def test_approx_error_collision_leaves_track_unassigned(collision):
    rep = approx_error(collision, analyze(collision), 1.0, steps=64)
    assert len(rep.branches) == 1 and len(rep.unassigned_tracks) == 1


def test_clusters_attract_tracks_at_large_t(generic, kappa_one):
    for inst in (generic, kappa_one):
        an = analyze(inst)
        t = 1e6
        for c in finite_clusters(inst, an):
            eig = spectrum_B(inst, t * cmath.exp(0.7j))
            assert np.min(np.abs(eig - c.zeta)) <= 10 * abs(c.b1) * t ** (-1 / c.k)


def test_convergence_generic(generic):
    an = analyze(generic)
    ts = [1e2, 1e3, 1e4]
    fit = convergence_order(generic, an, "infinity", ts, 2)
    assert fit.exponent == pytest.approx(-1, abs=0.15)
    assert fit.predicted == -1
    fit = convergence_order(generic, an, "cluster-2", ts, 1)
    assert fit.exponent == pytest.approx(-2, abs=0.2)


def test_convergence_exact(scalar):
    fit = convergence_order(scalar, analyze(scalar), "infinity", [0.5, 1, 10], 3)
    assert fit.exact and fit.exponent is None


def test_convergence_needs_three_points(generic):
    with pytest.raises(ValueError):
        convergence_order(generic, analyze(generic), "infinity", [1, 2], 1)


def test_fit_exponent():
    t = np.array([1.0, 10.0, 100.0])
    slope, exact = fit_exponent(t, 3 * t ** -1.5)
    assert slope == pytest.approx(-1.5) and not exact
    assert fit_exponent(t, [1e-16, 1e-15, 1e-14]) == (None, True)


def test_predicted_exponent(generic, kappa_one):
    an = analyze(kappa_one)
    assert predicted_exponent("infinity", 3, an, []) == -1
    an = analyze(generic)
    cl = finite_clusters(generic, an)
    assert predicted_exponent("cluster-1", 1, an, cl) == -2


def test_fit_coefficients(generic):
    an = analyze(generic)
    c1 = fit_expansion_coefficient(generic, an, "infinity", [1e2, 1e3, 1e4], 2,
                                   thetas=np.linspace(0, 6, 7), extra_terms=1)
    assert c1 == pytest.approx(5 / 54, abs=1e-6)
    b2 = fit_expansion_coefficient(generic, an, "cluster-2", [1e2, 1e3, 1e4], 1,
                                   thetas=np.linspace(0, 6, 7), extra_terms=1)
    assert b2 == pytest.approx(finite_clusters(generic, an)[1].b2, abs=1e-6)
