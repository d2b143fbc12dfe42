import math
from fractions import Fraction

import numpy as np
import pytest

from poisson_moments.errors import EnumerationTooLarge
from poisson_moments.estimation import Estimate, MCParams, combine_weighted
from poisson_moments.measure import DeterministicIntegrand, MeasureSpace
from poisson_moments.moments import (
    centered_moment_deterministic,
    compensated_moment_identity,
    count_integrand_exact,
    moment_composition_form,
    moment_deterministic,
    moment_partition_form,
    moment_random_lhs,
    moment_random_rhs,
    poisson_shifted_moment_poly,
    skorohod_moment_lhs,
    skorohod_moment_rhs,
    verify_random_identity,
    verify_skorohod_identity,
)
from poisson_moments.partitions import bell_polynomial
from poisson_moments.polynomials import Polynomial
from poisson_moments.process import Functional
from poisson_moments.registry import make_functional, make_integrand

from oracles import (
    brute_centered_moment_from_powers,
    brute_moment_from_powers,
    monomial_power_integrals,
)


def unit_space(lam=1.0):
    return MeasureSpace.uniform(lam)


def linear_f():
    return DeterministicIntegrand(lambda x: x, (0.0, 1.0))


# -- deterministic moments -----------------------------------------------------


@pytest.mark.parametrize("n", range(7))
def test_partition_form_matches_brute_force(n):
    powers = monomial_power_integrals(max(n, 1))
    expected = float(brute_moment_from_powers(powers, n))
    got = moment_partition_form([float(p) for p in powers], n)
    assert got == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", range(7))
def test_composition_form_matches_brute_force(n):
    powers = monomial_power_integrals(max(n, 1))
    expected = float(brute_moment_from_powers(powers, n))
    got = moment_composition_form([float(p) for p in powers], n)
    assert got == pytest.approx(expected, rel=1e-12)


def test_moment_deterministic_returns_both_routes():
    space = unit_space()
    m = moment_deterministic(space, linear_f(), 2)
    assert m.value == m.partition_form
    assert m.partition_form == pytest.approx(7 / 12, abs=1e-12)
    assert m.composition_form == pytest.approx(7 / 12, abs=1e-12)
    assert moment_deterministic(space, linear_f(), 1).value == pytest.approx(
        0.5, abs=1e-12
    )
    assert moment_deterministic(space, linear_f(), 0).value == 1.0


def test_moment_deterministic_indicator_is_bell_value():
    lam = 1.7
    space = MeasureSpace.uniform(lam)
    f = DeterministicIntegrand(lambda x: np.ones_like(x), (0.0, 1.0))
    for n in range(6):
        got = moment_deterministic(space, f, n).value
        assert got == pytest.approx(float(bell_polynomial(n)(lam)), rel=1e-11)


@pytest.mark.parametrize("n", [2, 3])
def test_centered_moment_single_block(n):
    # only the full block survives: centered order-n moment is the n-th power
    space = unit_space()
    expected = space.power_integrals(linear_f(), n)[n - 1]
    assert centered_moment_deterministic(space, linear_f(), n) == pytest.approx(
        expected, rel=1e-12
    )


def test_centered_moment_indicator_order_four():
    lam = 1.3
    space = MeasureSpace.uniform(lam)
    f = DeterministicIntegrand(lambda x: np.ones_like(x), (0.0, 1.0))
    assert centered_moment_deterministic(space, f, 4) == pytest.approx(
        lam + 3 * lam**2, rel=1e-11
    )


@pytest.mark.parametrize("n", range(2, 8))
def test_centered_moment_matches_brute_force(n):
    powers = monomial_power_integrals(n)
    expected = float(brute_centered_moment_from_powers(powers, n))
    got = centered_moment_deterministic(unit_space(), linear_f(), n)
    assert got == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("n", range(1, 8))
def test_binomial_inversion_consistency(n):
    # alternating binomial sum of raw moments reproduces the centered moment
    space = unit_space()
    f = linear_f()
    m1 = space.power_integrals(f, 1)[0]
    alternating = sum(
        (-1) ** c * math.comb(n, c) * m1**c
        * moment_deterministic(space, f, n - c).value
        for c in range(n + 1)
    )
    centered = centered_moment_deterministic(space, f, n)
    assert alternating == pytest.approx(centered, rel=1e-10, abs=1e-12)


def test_moment_cap():
    with pytest.raises(EnumerationTooLarge):
        moment_deterministic(unit_space(), linear_f(), 11)


# -- estimate plumbing -----------------------------------------------------------


def test_mcparams_validation():
    with pytest.raises(ValueError):
        MCParams(replicates=50)
    with pytest.raises(ValueError):
        MCParams(replicates=1000, confidence_multiplier=0.0)


def test_combine_weighted_quadrature():
    total = combine_weighted(
        [(2.0, Estimate(1.0, 0.3, 100)), (-1.0, Estimate(0.5, 0.4, 100))]
    )
    assert total.mean == pytest.approx(1.5)
    assert total.stderr == pytest.approx(math.hypot(0.6, 0.4))


def test_stderr_shrinks_like_root_replicates():
    space = unit_space()
    u = make_integrand("count", space)
    small = moment_random_lhs(space, u, None, 2, MCParams(replicates=2000, seed=1))
    big = moment_random_lhs(space, u, None, 2, MCParams(replicates=32000, seed=1))
    ratio = small.stderr / big.stderr
    assert 2.8 <= ratio <= 5.7  # ideal 4


# -- random-integrand identity ------------------------------------------------------


def test_random_lhs_zeroth_power_is_functional_mean():
    space = unit_space()
    u = make_integrand("count", space)
    F = make_functional("count", space)
    est = moment_random_lhs(space, u, F, 0, MCParams(replicates=5000, seed=5))
    direct = moment_random_lhs(
        space, make_integrand("indicator", space), F, 0,
        MCParams(replicates=5000, seed=5),
    )
    assert est.mean == pytest.approx(direct.mean, rel=1e-12)


def test_random_rhs_zeroth_power_is_functional_mean():
    space = unit_space()
    u = make_integrand("count", space)
    rhs, terms = moment_random_rhs(space, u, None, 0, MCParams(replicates=5000, seed=5))
    assert len(terms) == 1
    assert rhs.mean == 1.0 and rhs.stderr == 0.0


def test_fast_and_generic_paths_agree():
    space = unit_space()
    u = make_integrand("linear", space)
    mc = MCParams(replicates=4000, seed=9)
    fast = moment_random_lhs(space, u, None, 3, mc)
    generic = moment_random_lhs(space, u, Functional(lambda w: 1.0), 3, mc)
    assert fast.mean == pytest.approx(generic.mean, rel=1e-12)


def test_indicator_second_moment_near_bell_value():
    space = unit_space()
    u = make_integrand("indicator", space)
    est = moment_random_lhs(space, u, None, 2, MCParams(replicates=50_000, seed=13))
    assert abs(est.mean - 2.0) <= 3 * est.stderr  # order-2 Bell value at mass 1


def test_count_integrand_reaches_fourth_bell_value():
    space = unit_space()
    u = make_integrand("count", space)
    mc = MCParams(replicates=50_000, seed=17)
    report = verify_random_identity(space, u, None, 2, mc)
    assert abs(report.lhs.mean - 15.0) <= 3 * report.lhs.stderr
    assert report.passed


def test_deterministic_integrand_rhs_reduces_to_partition_sum():
    space = unit_space()
    u = make_integrand("linear", space)
    mc = MCParams(replicates=60_000, seed=19)
    rhs, terms = moment_random_rhs(space, u, None, 3, mc)
    exact = moment_deterministic(space, linear_f(), 3).value
    assert abs(rhs.mean - exact) <= 3 * rhs.stderr
    # each term estimates the product of power integrals of its profile
    powers = space.power_integrals(linear_f(), 3)
    by_label = {t.label: t for t in terms}
    prod_21 = powers[1] * powers[0]
    t = by_label["profile=[2, 1]"]
    assert abs(t.estimate.mean - prod_21) <= 4 * t.estimate.stderr


def test_random_identity_report_verdict_consistency():
    space = unit_space()
    u = make_integrand("count", space)
    mc = MCParams(replicates=5000, seed=23)
    report = verify_random_identity(space, u, None, 2, mc)
    recomputed = abs(report.lhs.mean - report.rhs.mean) <= report.tolerance
    assert report.passed == recomputed
    assert report.tolerance == pytest.approx(
        mc.confidence_multiplier * math.hypot(report.lhs.stderr, report.rhs.stderr)
    )


# -- compensated integrals ------------------------------------------------------------


def test_skorohod_moment_zeroth_power():
    space = unit_space()
    u = make_integrand("count-times-f", space, A=(0.0, 0.4), B=(0.6, 1.0))
    F = make_functional("count", space)
    lhs = skorohod_moment_lhs(space, u, F, 0, MCParams(replicates=5000, seed=3))
    rhs, _ = skorohod_moment_rhs(space, u, F, 0, MCParams(replicates=5000, seed=3))
    assert lhs.mean == pytest.approx(rhs.mean, rel=1e-12)


def test_skorohod_first_moment_vanishes():
    space = unit_space()
    u = make_integrand("count-times-f", space, A=(0.0, 0.4), B=(0.6, 1.0))
    lhs = skorohod_moment_lhs(space, u, None, 1, MCParams(replicates=50_000, seed=7))
    assert abs(lhs.mean) <= 3 * lhs.stderr


def test_skorohod_second_moment_deterministic_integrand():
    space = unit_space()
    u = make_integrand("linear", space)
    mc = MCParams(replicates=50_000, seed=11)
    lhs = skorohod_moment_lhs(space, u, None, 2, mc)
    m2 = space.power_integrals(linear_f(), 2)[1]
    assert abs(lhs.mean - m2) <= 3 * lhs.stderr
    rhs, _ = skorohod_moment_rhs(space, u, None, 2, mc)
    assert abs(rhs.mean - m2) <= 3 * rhs.stderr


@pytest.mark.parametrize("n", [1, 2, 3])
def test_skorohod_identity_window_count_integrand(n):
    # disjoint windows factorize: delta(u) = count(B) * (count(A) - mass(A))
    space = unit_space()
    lam_a, lam_b = 0.4, 0.4
    u = make_integrand("count-times-f", space, A=(0.0, 0.4), B=(0.6, 1.0))
    mc = MCParams(replicates=60_000, seed=13)
    report = verify_skorohod_identity(space, u, None, n, mc)
    assert report.passed
    centered = {1: 0.0, 2: lam_a, 3: lam_a}[n]  # central moments of count(A)
    exact = float(bell_polynomial(n)(lam_b)) * centered if n > 1 else 0.0
    tol = 4 * max(report.lhs.stderr, 1e-12)
    assert abs(report.lhs.mean - exact) <= tol


def test_compensated_identity_first_order_centered():
    space = unit_space()
    u = make_integrand("linear", space)
    report = compensated_moment_identity(
        space, u, None, 1, MCParams(replicates=50_000, seed=17)
    )
    assert report.passed
    assert abs(report.lhs.mean) <= 3 * report.lhs.stderr
    assert abs(report.rhs.mean) <= 3 * max(report.rhs.stderr, 1e-12)


def test_compensated_identity_matches_centered_moment():
    space = unit_space()
    u = make_integrand("linear", space)
    report = compensated_moment_identity(
        space, u, None, 3, MCParams(replicates=60_000, seed=19)
    )
    exact = centered_moment_deterministic(space, linear_f(), 3)
    assert abs(report.rhs.mean - exact) <= 3 * max(report.rhs.stderr, 1e-12)
    assert report.passed


def test_compensated_identity_count_integrand():
    space = unit_space()
    u = make_integrand("count", space)
    report = compensated_moment_identity(
        space, u, None, 2, MCParams(replicates=50_000, seed=23)
    )
    assert report.passed
    # pathwise integral is count^2, compensator count*mass:
    # E[(Z^2 - Z)^2] = B4 - 2 B3 + B2 at mass 1 -> 7
    assert abs(report.lhs.mean - 7.0) <= 3 * report.lhs.stderr


# -- exact count engine ------------------------------------------------------------


def test_shifted_moment_polynomial():
    # E[(Z+1)^2] = B2 + 2 B1 + 1 = lam^2 + 3 lam + 1
    assert poisson_shifted_moment_poly(2, 1) == Polynomial((1, 3, 1))
    assert poisson_shifted_moment_poly(0, 5) == Polynomial((1,))
    assert poisson_shifted_moment_poly(3, 0) == bell_polynomial(3)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_count_integrand_exact_reproduces_bell(n):
    assert count_integrand_exact(n) == bell_polynomial(2 * n)


def test_count_integrand_exact_small_cases():
    assert count_integrand_exact(1).coeffs == (0, 1, 1)
    assert count_integrand_exact(2).coeffs == (0, 1, 7, 6, 1)
    assert count_integrand_exact(3).coeffs == (0, 1, 31, 90, 65, 15, 1)
    with pytest.raises(ValueError):
        count_integrand_exact(0)
