"""Point configurations and the pathwise operators acting on them.

A configuration is a finite set of distinct points.  The operators are
purely pathwise: point addition, the configuration integral of a (possibly
configuration-dependent) integrand, the compensated anticipating integral,
and the add-one-point difference gradient.  A Monte Carlo check of the
duality between the gradient and the compensated integral lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .estimation import (
    Estimate,
    MCParams,
    RunningMoments,
    TAG_CONFIG,
    config_batches,
    stream_rng,
)
from .measure import Interval, MeasureSpace, composite_gauss_legendre


@dataclass(frozen=True, slots=True)
class Configuration:
    """A finite point configuration; points are distinct and ordered."""

    points: tuple[float, ...]

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError("configuration points must be distinct")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def count(self) -> int:
        return len(self.points)

    def count_in(self, interval: Interval) -> int:
        lo, hi = interval
        return sum(1 for p in self.points if lo <= p <= hi)

    def with_points(self, extra: Iterable[float]) -> "Configuration":
        """Set-union addition: points already present are not duplicated."""
        points = list(self.points)
        present = set(points)
        for p in extra:
            p = float(p)
            if p not in present:
                points.append(p)
                present.add(p)
        return Configuration(tuple(points))

    def without(self, point: float) -> "Configuration":
        """Remove one point by exact value."""
        idx = self.points.index(point)
        return Configuration(self.points[:idx] + self.points[idx + 1 :])


EMPTY = Configuration(())

RandomField = Callable[[float, Configuration], float]
FunctionalFn = Callable[[Configuration], float]


@dataclass(frozen=True)
class RandomIntegrand:
    """A bounded configuration-dependent integrand with compact support.

    ``fn(x, omega)`` is the value at point x under configuration omega; it
    must vanish for x outside ``support``.  Optional structure used by fast
    paths:

    * ``deterministic_values``: vectorized x-only evaluation, present iff
      the integrand ignores the configuration;
    * ``measure_integral``: closed form of the integral of x -> fn(x, omega)
      against a space's intensity, as a function of (space, omega);
    * ``exact_family``: marks integrands whose added-point expectations are
      polynomial in the total mass (used by the exact identity engine).
    """

    fn: RandomField
    support: Interval
    label: str = "integrand"
    deterministic_values: Callable[[np.ndarray], np.ndarray] | None = None
    measure_integral: Callable[[MeasureSpace, Configuration], float] | None = None
    exact_family: str | None = None

    @property
    def is_deterministic(self) -> bool:
        return self.deterministic_values is not None

    def __call__(self, x: float, omega: Configuration) -> float:
        return self.fn(x, omega)


@dataclass(frozen=True)
class Functional:
    """A bounded function of the configuration."""

    fn: FunctionalFn
    label: str = "functional"

    def __call__(self, omega: Configuration) -> float:
        return self.fn(omega)


def functional_value(F: Functional | FunctionalFn | None, omega: Configuration) -> float:
    if F is None:
        return 1.0
    return F(omega)


def sample_configuration(
    space: MeasureSpace, rng: np.random.Generator
) -> Configuration:
    """Poisson(total_mass) many i.i.d. points from the normalized measure.

    Sampled points coincide with probability zero; should that happen the
    offending draw is rejected and redrawn.
    """
    n = int(rng.poisson(space.total_mass)) if space.total_mass > 0 else 0
    if n == 0:
        return EMPTY
    for _ in range(8):
        pts = space.sample_points(rng, n)
        if len(set(pts.tolist())) == n:
            return Configuration(tuple(pts.tolist()))
    raise ValueError("sampler kept producing duplicate points")


def add_points(omega: Configuration, points: Sequence[float]) -> Configuration:
    """Enlarge a configuration by the given points (set union)."""
    return omega.with_points(points)


def pathwise_integral(u: RandomIntegrand, omega: Configuration) -> float:
    """Sum of u over the points of the configuration."""
    return sum(u.fn(x, omega) for x in omega.points)


def compensator(u: RandomIntegrand, space: MeasureSpace, omega: Configuration) -> float:
    """Integral of x -> u(x, omega) against the intensity measure."""
    if u.measure_integral is not None:
        return u.measure_integral(space, omega)
    return space.integrate(lambda xs: np.array([u.fn(x, omega) for x in xs]),
                           support=u.support)


def skorohod_integral(
    u: RandomIntegrand, omega: Configuration, space: MeasureSpace
) -> float:
    """Anticipating compensated integral.

    Each configuration point contributes u evaluated at the configuration
    with that point removed; the intensity integral of u at the intact
    configuration is subtracted.  For deterministic u this is exactly the
    compensated pathwise integral.
    """
    pathwise = sum(u.fn(x, omega.without(x)) for x in omega.points)
    return pathwise - compensator(u, space, omega)


def difference_gradient(
    F: Functional | FunctionalFn, x: float, omega: Configuration
) -> float:
    """Add-one-point gradient: F(omega + x) - F(omega)."""
    return functional_value(F, omega.with_points((x,))) - functional_value(F, omega)


#: Coarse panel rule for the inner x-integral of the duality check; the
#: registry families are piecewise polynomial in x on their support, so a
#: low order is already exact while keeping the per-replicate cost small.
DUALITY_INNER_ORDER = 16
DUALITY_INNER_PANELS = 4


def verify_duality(
    F: Functional | FunctionalFn | None,
    u: RandomIntegrand,
    space: MeasureSpace,
    mc: MCParams,
    *,
    inner_order: int = DUALITY_INNER_ORDER,
    inner_panels: int = DUALITY_INNER_PANELS,
) -> tuple[Estimate, Estimate]:
    """Monte Carlo check of the gradient/compensated-integral duality.

    Returns estimates of (E[<DF, u>], E[F * delta(u)]).  The inner product
    integrates x -> D_x F(omega) * u(x, omega) against the intensity by
    quadrature over u's support; both sides share the configuration stream.
    """
    lo = max(space.interval[0], u.support[0])
    hi = min(space.interval[1], u.support[1])

    # fixed inner rule: nodes and density-weighted weights are replicate
    # independent, so they are tabulated once
    x_nodes: list[float] = []
    w_nodes: list[float] = []
    if hi > lo and F is not None:
        base_nodes, base_weights = np.polynomial.legendre.leggauss(inner_order)
        edges = np.linspace(lo, hi, inner_panels + 1)
        for left, right in zip(edges[:-1], edges[1:]):
            half = 0.5 * (right - left)
            xs = 0.5 * (right + left) + half * base_nodes
            ws = half * base_weights * space.density(xs)
            x_nodes.extend(xs.tolist())
            w_nodes.extend(ws.tolist())

    inner = RunningMoments()
    outer = RunningMoments()
    for batch in config_batches(space, mc, TAG_CONFIG):
        inner_vals = np.empty(len(batch))
        outer_vals = np.empty(len(batch))
        for i in range(len(batch)):
            omega = Configuration(tuple(batch.replicate_points(i).tolist()))
            f_base = functional_value(F, omega)
            acc = 0.0
            for x, w in zip(x_nodes, w_nodes):
                grad = functional_value(F, omega.with_points((x,))) - f_base
                acc += w * grad * u.fn(x, omega)
            inner_vals[i] = acc
            outer_vals[i] = f_base * skorohod_integral(u, omega, space)
        inner.push(inner_vals)
        outer.push(outer_vals)
    return inner.estimate(), outer.estimate()
