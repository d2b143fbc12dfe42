"""Identities for Poisson counting variables and indicator integrands.

For Z a Poisson variable with mean lam, the power-weighted expectation
E[Z^n f(Z)] equals the Stirling-weighted sum of shifted expectations
sum_k lam^k S(n,k) E[f(Z+k)]; the exponential weight e^{tZ} has the
analogous series with coefficients lam^k (e^t - 1)^k / k!.  Covariances of
a functional against count powers reduce to Stirling-weighted added-point
expectations over the counting window, and centered count moments are the
no-singleton partition sums.

Polynomial count functions are handled exactly through shifted Bell
expansions; exponential ones by series with an explicit truncation rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import TruncationError
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
from .measure import Interval, MeasureSpace
from .moments import poisson_shifted_moment_poly
from .partitions import bell_polynomial, stirling2, stirling2_no_singletons
from .polynomials import Polynomial
from .process import Configuration, Functional, functional_value
from .report import (
    IdentityReport,
    TermEstimate,
    exact_report,
    mc_report,
)

STIRLING_IDENTITY_RTOL = 1e-9
EXPONENTIAL_IDENTITY_ATOL = 1e-8

#: Series truncation rule: stop once the term-to-accumulator ratio stays
#: below this for RULE_STREAK consecutive terms; give up at RULE_CAP terms.
RULE_RATIO = 1e-12
RULE_STREAK = 5
RULE_CAP = 200


@dataclass(frozen=True)
class CountFunction:
    """A function of a non-negative integer count: polynomial or exponential.

    Polynomials carry exact rational coefficients (index = power);
    exponentials are z -> exp(rate * z).  Admissible growth: polynomial or
    exponential, both of which have finite Poisson expectations.
    """

    kind: str  # "poly" | "exp"
    coeffs: tuple[Fraction, ...] = ()
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in ("poly", "exp"):
            raise ValueError(f"unknown count-function kind {self.kind!r}")

    @classmethod
    def polynomial(cls, coeffs: Sequence) -> "CountFunction":
        return cls("poly", tuple(Fraction(c) for c in coeffs))

    @classmethod
    def exponential(cls, rate: float) -> "CountFunction":
        return cls("exp", rate=float(rate))

    @classmethod
    def one(cls) -> "CountFunction":
        return cls.polynomial((1,))

    @classmethod
    def parse(cls, text: str) -> "CountFunction":
        """Parse "one", "poly:c0,c1,..." or "exp:rate"."""
        if text == "one":
            return cls.one()
        kind, _, args = text.partition(":")
        if kind == "poly":
            return cls.polynomial([Fraction(a) for a in args.split(",")])
        if kind == "exp":
            return cls.exponential(float(args))
        raise ValueError(f"cannot parse count function {text!r}")

    def __call__(self, z: int) -> float:
        if self.kind == "poly":
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return float(acc)
        return math.exp(self.rate * z)

    @property
    def label(self) -> str:
        if self.kind == "poly":
            return f"poly{[str(c) for c in self.coeffs]}"
        return f"exp({self.rate:g})"


def poisson_series(
    g: Callable[[int], float], lam: float, terms: int | None = None
) -> float:
    """sum_j g(j) e^{-lam} lam^j / j!, truncated by the ratio rule.

    With ``terms`` given, exactly that many terms are summed (no
    convergence check); otherwise the sum stops after RULE_STREAK
    consecutive terms with |term| < RULE_RATIO * |accumulated|, failing
    with :class:`TruncationError` at RULE_CAP terms.
    """
    if lam < 0:
        raise ValueError("lam must be >= 0")
    weight = math.exp(-lam)  # j = 0 probability
    acc = 0.0
    streak = 0
    cap = RULE_CAP if terms is None else terms
    term = 0.0
    for j in range(cap):
        term = g(j) * weight
        acc += term
        weight *= lam / (j + 1)
        if terms is None:
            if abs(term) < RULE_RATIO * max(abs(acc), 1e-300):
                streak += 1
                if streak >= RULE_STREAK:
                    return acc
            else:
                streak = 0
    if terms is None:
        raise TruncationError(
            f"series did not converge within {RULE_CAP} terms "
            f"(last term {term:.3e})",
            last_term=term,
            terms_used=cap,
        )
    return acc


def expectation_poly_of_count(f: CountFunction, shift: int = 0) -> Polynomial:
    """E[f(Z + shift)] as an exact polynomial in the Poisson mean."""
    if f.kind != "poly":
        raise ValueError("exact expectations require a polynomial count function")
    total = Polynomial.zero()
    for m, a in enumerate(f.coeffs):
        if a == 0:
            continue
        total = total + a * poisson_shifted_moment_poly(m, shift)
    return total


def expectation_of_count_function(
    f: CountFunction, lam: float, shift: int = 0
) -> float:
    """E[f(Z + shift)], exact for polynomials, by series for exponentials."""
    if f.kind == "poly":
        return float(expectation_poly_of_count(f, shift)(Fraction(lam)))
    return poisson_series(lambda j: f(j + shift), lam)


def stirling_moment_polynomials(
    n: int, f: CountFunction
) -> tuple[Polynomial, Polynomial]:
    """Both sides of the power-weighted expectation identity, symbolically.

    Left: E[Z^n f(Z)] expanded through Bell polynomials.  Right:
    sum_k S(n,k) * lam^k * E[f(Z+k)].  For polynomial f both sides are
    polynomials in lam of degree n + deg f and must agree coefficient-wise.
    """
    if f.kind != "poly":
        raise ValueError("symbolic identity requires a polynomial count function")
    lhs = Polynomial.zero()
    for m, a in enumerate(f.coeffs):
        if a == 0:
            continue
        lhs = lhs + a * bell_polynomial(n + m)
    rhs = Polynomial.zero()
    for k in range(n + 1):
        s = stirling2(n, k)
        if s == 0:
            continue
        rhs = rhs + s * expectation_poly_of_count(f, k).shift(k)
    return lhs, rhs


def stirling_moment_identity(
    lam: float, n: int, f: CountFunction
) -> IdentityReport:
    """E[Z^n f(Z)] against its Stirling-weighted shifted-expectation sum.

    Polynomial f: both sides in closed form, verdict at 1e-9 relative.
    Exponential f: both sides by truncated series under the ratio rule.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if f.kind == "poly":
        lhs_poly, rhs_poly = stirling_moment_polynomials(n, f)
        lhs = float(lhs_poly(Fraction(lam)))
        rhs = float(rhs_poly(Fraction(lam)))
        params = {
            "n": n,
            "lam": lam,
            "f": f.label,
            "lhs_coefficients": [str(c) for c in lhs_poly.coeffs],
            "rhs_coefficients": [str(c) for c in rhs_poly.coeffs],
            "coefficients_equal": lhs_poly == rhs_poly,
        }
    else:
        lhs = poisson_series(lambda j: j**n * f(j), lam)
        rhs = sum(
            lam**k * stirling2(n, k) * expectation_of_count_function(f, lam, k)
            for k in range(n + 1)
        )
        params = {"n": n, "lam": lam, "f": f.label}
    return exact_report(
        "stirling-moment", params, lhs, rhs, rel_tol=STIRLING_IDENTITY_RTOL
    )


def exponential_identity(
    lam: float, t: float, f: CountFunction, truncation: int | None = None
) -> IdentityReport:
    """E[f(Z) e^{tZ}] against the k-sum with coefficients lam^k (e^t-1)^k / k!.

    The left side is a direct series over the Poisson law; the right side
    truncates the k-sum by the ratio rule (or at ``truncation`` terms when
    given, with no convergence guarantee).  Verdict at 1e-8 absolute.
    """
    lhs = poisson_series(lambda j: f(j) * math.exp(t * j), lam)
    base = math.exp(t) - 1.0
    acc = 0.0
    coeff = 1.0  # lam^k (e^t - 1)^k / k!
    streak = 0
    cap = RULE_CAP if truncation is None else truncation
    term = 0.0
    converged = truncation is not None
    for k in range(cap):
        term = coeff * expectation_of_count_function(f, lam, k)
        acc += term
        coeff *= lam * base / (k + 1)
        if truncation is None:
            if abs(term) < RULE_RATIO * max(abs(acc), 1e-300):
                streak += 1
                if streak >= RULE_STREAK:
                    converged = True
                    break
            else:
                streak = 0
    if not converged:
        raise TruncationError(
            f"shifted-expectation sum did not converge within {RULE_CAP} terms "
            f"(last term {term:.3e})",
            last_term=term,
            terms_used=cap,
        )
    return exact_report(
        "exponential-weight",
        {"lam": lam, "t": t, "f": f.label, "truncation": truncation},
        lhs,
        acc,
        abs_tol=EXPONENTIAL_IDENTITY_ATOL,
    )


def centered_poisson_moment(lam: float, n: int) -> tuple[float, Polynomial]:
    """E[(Z - lam)^n] exactly: no-singleton partition sum in the mean."""
    if n < 0:
        raise ValueError("n must be >= 0")
    poly = Polynomial(tuple(stirling2_no_singletons(n, k) for k in range(n + 1)))
    return float(poly(Fraction(lam))), poly


def covariance_identity(
    space: MeasureSpace,
    A: Interval,
    F: Functional | None,
    n: int,
    mc: MCParams,
) -> IdentityReport:
    """Cov(F, count-in-A^n) against its Stirling-weighted added-point sum.

    Left: empirical covariance over configurations.  Right: for k = 1..n,
    S(n,k) * mass(A)^k times the Monte Carlo mean of
    F(omega + s_1..s_k) - F(omega) with the s_i i.i.d. from the measure
    restricted to A.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    lam_a = space.mass_of(A)
    restricted = space.restrict(A)

    f_vals: list[np.ndarray] = []
    z_vals: list[np.ndarray] = []
    for batch in config_batches(space, mc, TAG_CONFIG):
        fv = np.empty(len(batch))
        zv = np.empty(len(batch))
        for i in range(len(batch)):
            omega = Configuration(tuple(batch.replicate_points(i).tolist()))
            fv[i] = functional_value(F, omega)
            zv[i] = float(omega.count_in(A)) ** n
        f_vals.append(fv)
        z_vals.append(zv)
    f_all = np.concatenate(f_vals)
    z_all = np.concatenate(z_vals)
    products = (f_all - f_all.mean()) * (z_all - z_all.mean())
    lhs = Estimate(
        float(products.mean()),
        float(products.std(ddof=1) / math.sqrt(len(products))),
        len(products),
    )

    terms: list[TermEstimate] = []
    weighted: list[tuple[float, Estimate]] = []
    for k in range(1, n + 1):
        weight = float(stirling2(n, k))
        if weight == 0.0:
            continue
        acc = RunningMoments()
        points_iter = point_batches(restricted, mc, TAG_POINTS_BASE + k, k)
        for batch, s_rows in zip(config_batches(space, mc, TAG_CONFIG), points_iter):
            vals = np.empty(len(batch))
            for i in range(len(batch)):
                omega = Configuration(tuple(batch.replicate_points(i).tolist()))
                base = functional_value(F, omega)
                vals[i] = functional_value(F, omega.with_points(s_rows[i].tolist())) - base
            acc.push(vals)
        est = acc.estimate().scaled(lam_a**k)
        terms.append(TermEstimate(f"k={k}", weight, est))
        weighted.append((weight, est))
    rhs = combine_weighted(weighted) if weighted else Estimate.exact(0.0, mc.replicates)
    return mc_report(
        "covariance-count-power",
        {
            "n": n,
            "A": list(A),
            "mass_A": lam_a,
            "F": F.label if F is not None else "one",
            "replicates": mc.replicates,
        },
        lhs,
        rhs,
        mc.confidence_multiplier,
        terms,
        seed=mc.seed,
    )
