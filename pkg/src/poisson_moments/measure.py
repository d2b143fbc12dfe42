"""Finite-mass base spaces: integration against the intensity and sampling.

A space is either a real interval carrying a bounded density (the measure
is density * Lebesgue, diffuse by construction) or a single atom used for
abstract total-mass-only checks.  Interval spaces integrate with composite
Gauss-Legendre quadrature and sample points by inversion of a tabulated
cumulative distribution.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

Interval = tuple[float, float]

#: Named densities available to config files; each maps an array of points
#: to non-negative values.
DENSITIES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "uniform": lambda x: np.ones_like(x),
    "linear": lambda x: np.asarray(x, dtype=float),
    "quadratic": lambda x: np.asarray(x, dtype=float) ** 2,
    "exp-decay": lambda x: np.exp(-np.asarray(x, dtype=float)),
}

DEFAULT_QUADRATURE_ORDER = 64
DEFAULT_QUADRATURE_PANELS = 16
DEFAULT_SAMPLER_CELLS = 4096


@lru_cache(maxsize=None)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def composite_gauss_legendre(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    order: int,
    panels: int,
) -> float:
    """Integrate fn over [lo, hi] with `panels` Gauss-Legendre panels."""
    if hi <= lo:
        return 0.0
    nodes, weights = _leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        x = mid + half * nodes
        total += half * float(np.dot(weights, np.asarray(fn(x), dtype=float)))
    return total


class DeterministicIntegrand:
    """A bounded function with compact support, zero outside it."""

    __slots__ = ("fn", "support")

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], support: Interval):
        lo, hi = float(support[0]), float(support[1])
        if not lo <= hi:
            raise ValueError(f"invalid support [{lo}, {hi}]")
        self.fn = fn
        self.support = (lo, hi)

    def __call__(self, x):
        lo, hi = self.support
        x = np.asarray(x, dtype=float)
        inside = (x >= lo) & (x <= hi)
        return np.where(inside, np.asarray(self.fn(x), dtype=float), 0.0)


def indicator(interval: Interval) -> DeterministicIntegrand:
    lo, hi = interval
    return DeterministicIntegrand(lambda x: np.ones_like(x), (lo, hi))


class MeasureSpace:
    """An interval with a density, or a single atom; finite total mass.

    Interval spaces are immutable after construction: quadrature nodes and
    the inversion table for sampling are precomputed.  Sampling draws from
    the normalized measure and needs an explicitly passed generator.
    """

    def __init__(
        self,
        interval: Interval,
        density: Callable[[np.ndarray], np.ndarray],
        *,
        mass_scale: float = 1.0,
        quadrature_order: int = DEFAULT_QUADRATURE_ORDER,
        quadrature_panels: int = DEFAULT_QUADRATURE_PANELS,
        sampler_cells: int = DEFAULT_SAMPLER_CELLS,
        _atom: tuple[float, float] | None = None,
    ):
        self.quadrature_order = int(quadrature_order)
        self.quadrature_panels = int(quadrature_panels)
        self.sampler_cells = int(sampler_cells)
        if self.quadrature_order < 1 or self.quadrature_panels < 1:
            raise ValueError("quadrature order and panels must be >= 1")

        if _atom is not None:
            location, mass = _atom
            if mass < 0:
                raise ValueError("atom mass must be >= 0")
            self.kind = "atom"
            self.atom_location = float(location)
            self.interval = (float(location), float(location))
            self.density = None
            self.mass_scale = 1.0
            self.total_mass = float(mass)
            return

        lo, hi = float(interval[0]), float(interval[1])
        if not lo < hi:
            raise ValueError(f"interval must have positive length, got [{lo}, {hi}]")
        if mass_scale < 0:
            raise ValueError("mass_scale must be >= 0")
        self.kind = "interval"
        self.interval = (lo, hi)
        base = density
        scale = float(mass_scale)
        self.density = lambda x: scale * np.asarray(base(x), dtype=float)
        self.mass_scale = scale

        grid = np.linspace(lo, hi, self.sampler_cells + 1)
        rho = np.asarray(self.density(grid), dtype=float)
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise ValueError("density must be finite and non-negative on the interval")
        steps = np.diff(grid)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (rho[:-1] + rho[1:]) * steps)))
        self._grid = grid
        self._cum = cum
        self.total_mass = composite_gauss_legendre(
            self.density, lo, hi, self.quadrature_order, self.quadrature_panels
        )

    # -- constructors -------------------------------------------------

    @classmethod
    def atom(cls, mass: float, location: float = 0.0) -> "MeasureSpace":
        """A point mass: supports integration only, not sampling."""
        return cls((location, location), lambda x: x, _atom=(location, mass))

    @classmethod
    def uniform(
        cls, total_mass: float, interval: Interval = (0.0, 1.0), **kwargs
    ) -> "MeasureSpace":
        """Constant density scaled so the interval carries `total_mass`."""
        lo, hi = float(interval[0]), float(interval[1])
        if not lo < hi:
            raise ValueError("interval must have positive length")
        return cls(
            (lo, hi),
            DENSITIES["uniform"],
            mass_scale=float(total_mass) / (hi - lo),
            **kwargs,
        )

    # -- integration ---------------------------------------------------

    def integrate(
        self,
        g: DeterministicIntegrand | Callable[[np.ndarray], np.ndarray],
        support: Interval | None = None,
    ) -> float:
        """Quadrature of g against the measure, restricted to g's support.

        Panels are aligned to the support so indicator-style integrands
        with support-matching edges integrate exactly (up to the rule's
        polynomial exactness).
        """
        if isinstance(g, DeterministicIntegrand):
            fn, (s_lo, s_hi) = g.fn, g.support
        else:
            if support is None:
                raise ValueError("raw callables need an explicit support")
            fn, (s_lo, s_hi) = g, (float(support[0]), float(support[1]))

        if self.kind == "atom":
            if s_lo <= self.atom_location <= s_hi:
                value = float(np.asarray(fn(np.array([self.atom_location])))[0])
                return self.total_mass * value
            return 0.0

        lo = max(self.interval[0], s_lo)
        hi = min(self.interval[1], s_hi)
        if hi <= lo:
            return 0.0
        product = lambda x: np.asarray(fn(x), dtype=float) * self.density(x)
        value = composite_gauss_legendre(
            product, lo, hi, self.quadrature_order, self.quadrature_panels
        )
        if not math.isfinite(value):
            raise ValueError("integrand produced a non-finite value")
        return value

    def mass_of(self, interval: Interval) -> float:
        """Measure of a sub-interval."""
        if self.kind == "atom":
            lo, hi = interval
            return self.total_mass if lo <= self.atom_location <= hi else 0.0
        return self.integrate(lambda x: np.ones_like(x), support=interval)

    def power_integrals(
        self, f: DeterministicIntegrand, n_max: int
    ) -> np.ndarray:
        """Integrals of f^k against the measure for k = 1..n_max.

        Shares quadrature nodes across powers, so entry k matches a direct
        ``integrate`` call on f^k.
        """
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.kind == "atom":
            value = float(np.asarray(f.fn(np.array([self.atom_location])))[0])
            return self.total_mass * np.array(
                [value**k for k in range(1, n_max + 1)]
            )
        lo = max(self.interval[0], f.support[0])
        hi = min(self.interval[1], f.support[1])
        out = np.zeros(n_max)
        if hi <= lo:
            return out
        nodes, weights = _leggauss(self.quadrature_order)
        edges = np.linspace(lo, hi, self.quadrature_panels + 1)
        for left, right in zip(edges[:-1], edges[1:]):
            half = 0.5 * (right - left)
            x = 0.5 * (right + left) + half * nodes
            fx = np.asarray(f.fn(x), dtype=float)
            w = half * weights * self.density(x)
            powered = fx.copy()
            for k in range(n_max):
                out[k] += float(np.dot(w, powered))
                powered = powered * fx
        return out

    # -- sampling -------------------------------------------------------

    def sample_points(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw points from the normalized measure by inversion."""
        if self.kind == "atom":
            raise ValueError(
                "atomic spaces support integration only; sampling needs a "
                "diffuse interval space"
            )
        if self.total_mass <= 0.0 or self._cum[-1] <= 0.0:
            raise ValueError("cannot sample from a zero-mass space")
        u = rng.random(size) * self._cum[-1]
        return np.interp(u, self._cum, self._grid)

    def sample_point(self, rng: np.random.Generator) -> float:
        return float(self.sample_points(rng, 1)[0])

    # -- derived spaces ---------------------------------------------------

    def restrict(self, interval: Interval) -> "MeasureSpace":
        """The same density restricted to a sub-interval."""
        if self.kind == "atom":
            raise ValueError("cannot restrict an atomic space")
        lo = max(self.interval[0], float(interval[0]))
        hi = min(self.interval[1], float(interval[1]))
        if not lo < hi:
            raise ValueError("restriction interval does not meet the space")
        return MeasureSpace(
            (lo, hi),
            self.density,
            mass_scale=1.0,
            quadrature_order=self.quadrature_order,
            quadrature_panels=self.quadrature_panels,
            sampler_cells=self.sampler_cells,
        )


def space_from_config(config: dict | str | Path) -> MeasureSpace:
    """Build a space from a declarative JSON config (dict, path, or text).

    Schema (kind "interval"):
        {"kind": "interval", "interval": [lo, hi], "density": "<name>",
         "mass_scale": s, "quadrature_order": o, "quadrature_panels": p,
         "sampler_cells": m}
    Schema (kind "atom"):
        {"kind": "atom", "mass": m, "location": x}

    `density` must name an entry of DENSITIES; only "kind" and, for
    intervals, "interval" are required.
    """
    if isinstance(config, (str, Path)):
        path = Path(config)
        text = path.read_text() if path.exists() else str(config)
        config = json.loads(text)
    if not isinstance(config, dict):
        raise ValueError("config must be a JSON object")
    kind = config.get("kind", "interval")
    if kind == "atom":
        return MeasureSpace.atom(
            float(config.get("mass", 1.0)), float(config.get("location", 0.0))
        )
    if kind != "interval":
        raise ValueError(f"unknown space kind {kind!r}")
    if "interval" not in config:
        raise ValueError("interval spaces require an 'interval' field")
    name = config.get("density", "uniform")
    if name not in DENSITIES:
        raise ValueError(
            f"unknown density {name!r}; available: {sorted(DENSITIES)}"
        )
    lo, hi = config["interval"]
    return MeasureSpace(
        (float(lo), float(hi)),
        DENSITIES[name],
        mass_scale=float(config.get("mass_scale", 1.0)),
        quadrature_order=int(
            config.get("quadrature_order", DEFAULT_QUADRATURE_ORDER)
        ),
        quadrature_panels=int(
            config.get("quadrature_panels", DEFAULT_QUADRATURE_PANELS)
        ),
        sampler_cells=int(config.get("sampler_cells", DEFAULT_SAMPLER_CELLS)),
    )
