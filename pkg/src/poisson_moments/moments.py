"""Moment identities: exact partition sums and Monte Carlo estimators.

Deterministic integrands get exact evaluation: the n-th moment of the
configuration integral is a sum over block-size profiles of the partition
count times a product of power integrals, cross-checked against the
equivalent multiplicity-vector (composition) sum.  Random integrands get
Monte Carlo estimators for both sides of the partition identities, with
per-profile term breakdowns, shared configuration streams, and standard
errors combined in quadrature.  Count-type integrands additionally get an
exact engine producing polynomial identities in the total mass.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import EnumerationTooLarge, IdentityViolation, InternalConsistencyError
from .estimation import (
    Estimate,
    MCParams,
    RunningMoments,
    TAG_CONFIG,
    TAG_POINTS_BASE,
    combine_weighted,
    config_batches,
    point_batches,
)
from .measure import DeterministicIntegrand, MeasureSpace
from .partitions import (
    Profile,
    bell_polynomial,
    integer_partitions,
    profile_count,
    stirling2,
)
from .polynomials import Polynomial
from .process import (
    Configuration,
    Functional,
    RandomIntegrand,
    compensator,
    functional_value,
    pathwise_integral,
    skorohod_integral,
)
from .report import IdentityReport, TermEstimate, mc_report

#: Partition sums grow like the Bell numbers; identities are refused above
#: this order.
PARTITION_SUM_CAP = 10

FORM_AGREEMENT_RTOL = 1e-10


def _check_order(n: int) -> None:
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n > PARTITION_SUM_CAP:
        raise EnumerationTooLarge(
            f"enumeration too large: moment order {n} exceeds cap {PARTITION_SUM_CAP}"
        )


# ---------------------------------------------------------------------------
# deterministic integrands: exact partition sums
# ---------------------------------------------------------------------------


class DeterministicMoment(NamedTuple):
    """Exact moment with both evaluation routes retained."""

    value: float
    partition_form: float
    composition_form: float


def moment_partition_form(power_ints: Sequence[float], n: int) -> float:
    """Sum over block-size profiles of N_profile * prod_i m_{l_i}.

    ``power_ints[k-1]`` must hold the k-th power integral of the integrand.
    """
    if n == 0:
        return 1.0
    total = 0.0
    for sizes in integer_partitions(n):
        term = float(profile_count(sizes))
        for size in sizes:
            term *= power_ints[size - 1]
        total += term
    return total


def _multiplicity_vectors(n: int) -> Iterator[tuple[int, ...]]:
    """Vectors (r_1..r_n) with sum k*r_k = n."""

    def rec(k: int, remaining: int, acc: tuple[int, ...]):
        if k > n:
            if remaining == 0:
                yield acc
            return
        for r in range(remaining // k + 1):
            yield from rec(k + 1, remaining - k * r, acc + (r,))

    yield from rec(1, n, ())


def moment_composition_form(power_ints: Sequence[float], n: int) -> float:
    """Multiplicity-vector form: n! sum over (r_k) of
    prod_k m_k^{r_k} / ((k!)^{r_k} r_k!), with exact rational weights."""
    if n == 0:
        return 1.0
    total = 0.0
    n_fact = math.factorial(n)
    for vector in _multiplicity_vectors(n):
        weight = Fraction(n_fact)
        value = 1.0
        for k, r in enumerate(vector, start=1):
            if r == 0:
                continue
            weight /= Fraction(math.factorial(k)) ** r * math.factorial(r)
            value *= power_ints[k - 1] ** r
        total += float(weight) * value
    return total


def moment_deterministic(
    space: MeasureSpace, f: DeterministicIntegrand, n: int
) -> DeterministicMoment:
    """Exact n-th moment of the configuration integral of a deterministic f.

    Both the profile sum and the multiplicity-vector sum are evaluated; a
    relative disagreement beyond 1e-10 raises
    :class:`InternalConsistencyError`.
    """
    _check_order(n)
    if n == 0:
        return DeterministicMoment(1.0, 1.0, 1.0)
    m = space.power_integrals(f, n)
    part = moment_partition_form(m, n)
    comp = moment_composition_form(m, n)
    scale = max(1.0, abs(part), abs(comp))
    if abs(part - comp) > FORM_AGREEMENT_RTOL * scale:
        raise InternalConsistencyError(
            f"moment forms disagree at n={n}: partition {part!r} vs "
            f"composition {comp!r}"
        )
    return DeterministicMoment(part, part, comp)


def centered_moment_deterministic(
    space: MeasureSpace, f: DeterministicIntegrand, n: int
) -> float:
    """Exact n-th centered moment: profiles restricted to blocks of size >= 2."""
    _check_order(n)
    if n == 0:
        return 1.0
    m = space.power_integrals(f, n)
    total = 0.0
    for sizes in integer_partitions(n, min_part=2):
        term = float(profile_count(sizes))
        for size in sizes:
            term *= m[size - 1]
        total += term
    return total


# ---------------------------------------------------------------------------
# random integrands: Monte Carlo estimators for both sides
# ---------------------------------------------------------------------------


def _configs(batch) -> list[Configuration]:
    return [
        Configuration(tuple(batch.replicate_points(i).tolist()))
        for i in range(len(batch))
    ]


def moment_random_lhs(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> Estimate:
    """Monte Carlo mean of F * (configuration integral of u)^n."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    acc = RunningMoments()
    fast = u.is_deterministic and F is None
    for batch in config_batches(space, mc, TAG_CONFIG):
        if fast:
            values = np.asarray(u.deterministic_values(batch.points), dtype=float)
            sums = np.zeros(len(batch))
            if batch.points.size:
                rep_idx = np.repeat(np.arange(len(batch)), batch.counts)
                sums = np.bincount(rep_idx, weights=values, minlength=len(batch))
            acc.push(sums**n)
        else:
            vals = np.empty(len(batch))
            for i, omega in enumerate(_configs(batch)):
                vals[i] = functional_value(F, omega) * pathwise_integral(u, omega) ** n
            acc.push(vals)
    return acc.estimate()


def moment_random_rhs(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> tuple[Estimate, list[TermEstimate]]:
    """Partition-sum side of the random-integrand moment identity.

    For each block-size profile (l_1..l_k), estimates the expectation of
    the added-point evaluation

        F(omega + s_1..s_k) * prod_p u(s_p, omega + s_1..s_k)^{l_p}

    with s_p i.i.d. from the normalized measure, scaled by total_mass^k and
    weighted by the number of partitions realizing the profile.
    """
    _check_order(n)
    lam = space.total_mass
    terms: list[TermEstimate] = []
    weighted: list[tuple[float, Estimate]] = []
    for t_idx, sizes in enumerate(integer_partitions(n)):
        k = len(sizes)
        weight = float(profile_count(sizes))
        if k > 0 and lam <= 0.0:
            est = Estimate(0.0, 0.0, mc.replicates)
        else:
            acc = RunningMoments()
            points_iter = point_batches(space, mc, TAG_POINTS_BASE + t_idx, k)
            for batch, s_rows in zip(config_batches(space, mc, TAG_CONFIG), points_iter):
                vals = np.empty(len(batch))
                for i, omega in enumerate(_configs(batch)):
                    s = s_rows[i].tolist()
                    enlarged = omega.with_points(s)
                    value = functional_value(F, enlarged)
                    for s_p, l_p in zip(s, sizes):
                        value *= u.fn(s_p, enlarged) ** l_p
                    vals[i] = value
                acc.push(vals)
            est = acc.estimate().scaled(lam**k)
        label = f"profile={list(sizes)}" if sizes else "profile=[]"
        terms.append(TermEstimate(label, weight, est))
        weighted.append((weight, est))
    return combine_weighted(weighted), terms


def verify_random_identity(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> IdentityReport:
    """Both sides of the random-integrand moment identity, with verdict."""
    lhs = moment_random_lhs(space, u, F, n, mc)
    rhs, terms = moment_random_rhs(space, u, F, n, mc)
    return mc_report(
        "random-integrand-moment",
        {
            "n": n,
            "total_mass": space.total_mass,
            "u": u.label,
            "F": F.label if F is not None else "one",
            "replicates": mc.replicates,
        },
        lhs,
        rhs,
        mc.confidence_multiplier,
        terms,
        seed=mc.seed,
    )


# ---------------------------------------------------------------------------
# compensated (anticipating) integrals
# ---------------------------------------------------------------------------


def skorohod_moment_lhs(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> Estimate:
    """Monte Carlo mean of F * delta(u)^n."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    acc = RunningMoments()
    for batch in config_batches(space, mc, TAG_CONFIG):
        vals = np.empty(len(batch))
        for i, omega in enumerate(_configs(batch)):
            vals[i] = (
                functional_value(F, omega)
                * skorohod_integral(u, omega, space) ** n
            )
        acc.push(vals)
    return acc.estimate()


def _signed_singleton_terms(n: int) -> Iterator[tuple[int, int, tuple[int, ...]]]:
    """(c, signed binomial, profile of n-c) triples of the alternating sum."""
    for c in range(n + 1):
        sign = -1 if c % 2 else 1
        coeff = sign * math.comb(n, c)
        if n - c == 0:
            yield c, coeff, ()
        else:
            for sizes in integer_partitions(n - c):
                yield c, coeff, sizes


def skorohod_moment_rhs(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> tuple[Estimate, list[TermEstimate]]:
    """Partition-sum side of the compensated-integral moment identity.

    Terms run over a singleton count c and a profile (l_1..l_k) of n - c,
    weighted by (-1)^c binom(n, c) N_profile.  Only the first k sampled
    points are added to the configuration; the c singleton points stay pure
    integration variables.  The integrand factor for p <= k is evaluated
    with its own point removed from the added block, and for p > k at the
    fully enlarged configuration.
    """
    _check_order(n)
    lam = space.total_mass
    terms: list[TermEstimate] = []
    weighted: list[tuple[float, Estimate]] = []
    for t_idx, (c, coeff, sizes) in enumerate(_signed_singleton_terms(n)):
        k = len(sizes)
        b = k + c
        weight = float(coeff * profile_count(sizes))
        if b > 0 and lam <= 0.0:
            est = Estimate(0.0, 0.0, mc.replicates)
        else:
            acc = RunningMoments()
            points_iter = point_batches(space, mc, TAG_POINTS_BASE + t_idx, b)
            for batch, s_rows in zip(config_batches(space, mc, TAG_CONFIG), points_iter):
                vals = np.empty(len(batch))
                for i, omega in enumerate(_configs(batch)):
                    s = s_rows[i].tolist()
                    added = s[:k]
                    enlarged = omega.with_points(added)
                    value = functional_value(F, enlarged)
                    for p in range(k):
                        value *= u.fn(s[p], enlarged.without(s[p])) ** sizes[p]
                    for p in range(k, b):
                        value *= u.fn(s[p], enlarged)
                    vals[i] = value
                acc.push(vals)
            est = acc.estimate().scaled(lam**b)
        label = f"c={c} profile={list(sizes)}"
        terms.append(TermEstimate(label, weight, est))
        weighted.append((weight, est))
    return combine_weighted(weighted), terms


def verify_skorohod_identity(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> IdentityReport:
    lhs = skorohod_moment_lhs(space, u, F, n, mc)
    rhs, terms = skorohod_moment_rhs(space, u, F, n, mc)
    return mc_report(
        "compensated-skorohod-moment",
        {
            "n": n,
            "total_mass": space.total_mass,
            "u": u.label,
            "F": F.label if F is not None else "one",
            "replicates": mc.replicates,
        },
        lhs,
        rhs,
        mc.confidence_multiplier,
        terms,
        seed=mc.seed,
    )


def compensated_moment_identity(
    space: MeasureSpace,
    u: RandomIntegrand,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> IdentityReport:
    """Centered pathwise moment against its alternating partition sum.

    LHS: Monte Carlo of F * (pathwise integral - intensity integral)^n.
    RHS: sum over c and profiles of n - c, with every factor (including the
    c-th power of the intensity integral) evaluated at the enlarged
    configuration.
    """
    _check_order(n)
    lam = space.total_mass

    lhs_acc = RunningMoments()
    for batch in config_batches(space, mc, TAG_CONFIG):
        vals = np.empty(len(batch))
        for i, omega in enumerate(_configs(batch)):
            centered = pathwise_integral(u, omega) - compensator(u, space, omega)
            vals[i] = functional_value(F, omega) * centered**n
        lhs_acc.push(vals)
    lhs = lhs_acc.estimate()

    terms: list[TermEstimate] = []
    weighted: list[tuple[float, Estimate]] = []
    for t_idx, (c, coeff, sizes) in enumerate(_signed_singleton_terms(n)):
        a = len(sizes)
        weight = float(coeff * profile_count(sizes))
        if a > 0 and lam <= 0.0:
            est = Estimate(0.0, 0.0, mc.replicates)
        else:
            acc = RunningMoments()
            points_iter = point_batches(space, mc, TAG_POINTS_BASE + t_idx, a)
            for batch, s_rows in zip(config_batches(space, mc, TAG_CONFIG), points_iter):
                vals = np.empty(len(batch))
                for i, omega in enumerate(_configs(batch)):
                    s = s_rows[i].tolist()
                    enlarged = omega.with_points(s)
                    value = functional_value(F, enlarged)
                    if c:
                        value *= compensator(u, space, enlarged) ** c
                    for s_p, l_p in zip(s, sizes):
                        value *= u.fn(s_p, enlarged) ** l_p
                    vals[i] = value
                acc.push(vals)
            est = acc.estimate().scaled(lam**a)
        terms.append(TermEstimate(f"c={c} profile={list(sizes)}", weight, est))
        weighted.append((weight, est))
    rhs = combine_weighted(weighted)
    return mc_report(
        "compensated-pathwise-moment",
        {
            "n": n,
            "total_mass": space.total_mass,
            "u": u.label,
            "F": F.label if F is not None else "one",
            "replicates": mc.replicates,
        },
        lhs,
        rhs,
        mc.confidence_multiplier,
        terms,
        seed=mc.seed,
    )


# ---------------------------------------------------------------------------
# exact engine for count-type integrands
# ---------------------------------------------------------------------------


def poisson_shifted_moment_poly(m: int, k: int) -> Polynomial:
    """E[(Z + k)^m] as a polynomial in the Poisson mean."""
    if m < 0 or k < 0:
        raise ValueError("m and k must be >= 0")
    total = Polynomial.zero()
    for j in range(m + 1):
        total = total + (math.comb(m, j) * k ** (m - j)) * bell_polynomial(j)
    return total


def count_integrand_exact(n: int) -> Polynomial:
    """Exact moment polynomial for the total-count integrand.

    The configuration integral of u(x, omega) = omega-count is the squared
    count, so the order-n moment is the raw moment of order 2n of a Poisson
    variable.  The partition sum evaluates term by term to

        sum_k S(n, k) * mass^k * E[(Z + k)^n],

    which must reproduce the order-2n Bell polynomial coefficient for
    coefficient; a mismatch raises :class:`IdentityViolation`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_order(n)
    total = Polynomial.zero()
    for k in range(1, n + 1):
        total = total + stirling2(n, k) * poisson_shifted_moment_poly(n, k).shift(k)
    expected = bell_polynomial(2 * n)
    if total != expected:
        raise IdentityViolation(
            f"count-integrand moment at n={n} does not match the order-{2*n} "
            f"Bell polynomial: {total!r} vs {expected!r}"
        )
    return total
