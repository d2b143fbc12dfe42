"""Built-in integrand and functional families, selected by identifier.

Integrands (``make_integrand``):

==================  ============================================  =========
identifier          value of u(x, omega)                          parameters
==================  ============================================  =========
indicator           1 on the window A                             A
linear              x on the window A                             A
count               total point count, on the window A            A
count-times-f       count inside B, carried by the window A       A, B
poly-of-count       p(total count) on the window A                A, poly
==================  ============================================  =========

Functionals (``make_functional``): ``one`` (the constant 1, returned as
None so estimators can skip the call), ``count``, ``count-sq``,
``count-in`` (points inside B), ``poly-of-count``.

Windows default to the full space interval.  All families are bounded with
compact support once the total mass is finite, and every family exposes a
closed-form intensity integral so the compensated operators avoid
per-replicate quadrature.
"""

from __future__ import annotations

import weakref
from typing import Callable, Sequence

import numpy as np

from .measure import Interval, MeasureSpace
from .process import Configuration, Functional, RandomIntegrand

INTEGRAND_IDS = ("indicator", "linear", "count", "count-times-f", "poly-of-count")
FUNCTIONAL_IDS = ("one", "count", "count-sq", "count-in", "poly-of-count")

#: Integrand families whose added-point expectations are polynomial in the
#: total mass; only these are eligible for the exact identity engine.
EXACT_FAMILIES = ("indicator", "count", "poly-of-count")


def _window(space: MeasureSpace, interval: Interval | None) -> Interval:
    if interval is None:
        return space.interval
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError(f"window must have positive length, got [{lo}, {hi}]")
    return (lo, hi)


def _poly_eval(coeffs: Sequence[float], z: float) -> float:
    acc = 0.0
    for c in reversed(tuple(coeffs)):
        acc = acc * z + c
    return acc


def _per_space(compute: Callable[[MeasureSpace], float]) -> Callable[[MeasureSpace], float]:
    """Memoize a per-space constant (compensators are hit once per replicate)."""
    cache: "weakref.WeakKeyDictionary[MeasureSpace, float]" = weakref.WeakKeyDictionary()

    def cached(space: MeasureSpace) -> float:
        value = cache.get(space)
        if value is None:
            value = compute(space)
            cache[space] = value
        return value

    return cached


def make_integrand(
    name: str,
    space: MeasureSpace,
    *,
    A: Interval | None = None,
    B: Interval | None = None,
    poly: Sequence[float] | None = None,
) -> RandomIntegrand:
    """Build a registry integrand bound to a space's interval defaults."""
    window = _window(space, A)
    w_lo, w_hi = window
    window_mass = _per_space(lambda sp: sp.mass_of(window))

    if name == "indicator":
        return RandomIntegrand(
            fn=lambda x, omega: 1.0 if w_lo <= x <= w_hi else 0.0,
            support=window,
            label=f"indicator[{w_lo:g},{w_hi:g}]",
            deterministic_values=lambda xs: np.where(
                (xs >= w_lo) & (xs <= w_hi), 1.0, 0.0
            ),
            measure_integral=lambda sp, omega: window_mass(sp),
            exact_family="indicator",
        )

    if name == "linear":
        first_moment = _per_space(
            lambda sp: sp.integrate(lambda xs: xs, support=window)
        )
        return RandomIntegrand(
            fn=lambda x, omega: x if w_lo <= x <= w_hi else 0.0,
            support=window,
            label=f"linear[{w_lo:g},{w_hi:g}]",
            deterministic_values=lambda xs: np.where(
                (xs >= w_lo) & (xs <= w_hi), xs, 0.0
            ),
            measure_integral=lambda sp, omega: first_moment(sp),
        )

    if name == "count":
        return RandomIntegrand(
            fn=lambda x, omega: float(len(omega)) if w_lo <= x <= w_hi else 0.0,
            support=window,
            label=f"count[{w_lo:g},{w_hi:g}]",
            measure_integral=lambda sp, omega: len(omega) * window_mass(sp),
            exact_family="count",
        )

    if name == "count-times-f":
        if B is None:
            raise ValueError("count-times-f needs the counting window B")
        b = _window(space, B)
        return RandomIntegrand(
            fn=lambda x, omega: (
                float(omega.count_in(b)) if w_lo <= x <= w_hi else 0.0
            ),
            support=window,
            label=f"count[{b[0]:g},{b[1]:g}]*indicator[{w_lo:g},{w_hi:g}]",
            measure_integral=lambda sp, omega: omega.count_in(b) * window_mass(sp),
        )

    if name == "poly-of-count":
        if poly is None:
            raise ValueError("poly-of-count needs polynomial coefficients")
        coeffs = tuple(float(c) for c in poly)
        return RandomIntegrand(
            fn=lambda x, omega: (
                _poly_eval(coeffs, float(len(omega))) if w_lo <= x <= w_hi else 0.0
            ),
            support=window,
            label=f"poly{list(coeffs)}-of-count[{w_lo:g},{w_hi:g}]",
            measure_integral=lambda sp, omega: (
                _poly_eval(coeffs, float(len(omega))) * window_mass(sp)
            ),
            exact_family="poly-of-count",
        )

    raise ValueError(f"unknown integrand {name!r}; available: {INTEGRAND_IDS}")


def make_functional(
    name: str,
    space: MeasureSpace,
    *,
    B: Interval | None = None,
    poly: Sequence[float] | None = None,
) -> Functional | None:
    """Build a registry functional; "one" returns None (the constant 1)."""
    if name == "one":
        return None
    if name == "count":
        return Functional(lambda omega: float(len(omega)), "count")
    if name == "count-sq":
        return Functional(lambda omega: float(len(omega)) ** 2, "count-sq")
    if name == "count-in":
        window = _window(space, B)
        return Functional(
            lambda omega: float(omega.count_in(window)),
            f"count-in[{window[0]:g},{window[1]:g}]",
        )
    if name == "poly-of-count":
        if poly is None:
            raise ValueError("poly-of-count needs polynomial coefficients")
        coeffs = tuple(float(c) for c in poly)
        return Functional(
            lambda omega: _poly_eval(coeffs, float(len(omega))),
            f"poly{list(coeffs)}-of-count",
        )
    raise ValueError(f"unknown functional {name!r}; available: {FUNCTIONAL_IDS}")
