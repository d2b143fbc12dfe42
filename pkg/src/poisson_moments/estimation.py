"""Monte Carlo plumbing: estimates, replicate streams, batch sampling.

Randomness is organized as named sub-streams of a single 64-bit seed:
stream (seed, tag, batch_start) drives replicates [batch_start,
batch_start + batch).  Estimators that share a tag therefore see identical
draws replicate by replicate (common random numbers), and results do not
depend on how batches are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .measure import MeasureSpace

#: Stream tags.  The configuration stream is shared by both sides of an
#: identity (common random numbers); auxiliary point streams are offset per
#: term so they stay independent.
TAG_CONFIG = 0
TAG_POINTS_BASE = 100

DEFAULT_BATCH = 8192

_SEED_MASK = (1 << 64) - 1


def stream_rng(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream identified by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence((seed & _SEED_MASK, *key)))


@dataclass(frozen=True)
class MCParams:
    """Replicate count, master seed, and the confidence multiplier."""

    replicates: int
    seed: int = 0
    confidence_multiplier: float = 3.0
    batch: int = DEFAULT_BATCH

    def __post_init__(self):
        if self.replicates < 100:
            raise ValueError("replicates must be >= 100")
        if self.confidence_multiplier <= 0:
            raise ValueError("confidence_multiplier must be > 0")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    replicates: int

    @classmethod
    def exact(cls, value: float, replicates: int = 1) -> "Estimate":
        return cls(float(value), 0.0, replicates)

    def scaled(self, factor: float) -> "Estimate":
        return Estimate(factor * self.mean, abs(factor) * self.stderr, self.replicates)


class RunningMoments:
    """Streaming mean/variance accumulator over batches of values."""

    __slots__ = ("count", "total", "total_sq")

    def __init__(self):
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0

    def push(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        self.count += values.size
        self.total += float(values.sum())
        self.total_sq += float(np.dot(values, values))

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("no values accumulated")
        return self.total / self.count

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        var = (self.total_sq - self.count * self.mean**2) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)

    def estimate(self) -> Estimate:
        return Estimate(self.mean, self.stderr, self.count)


def combine_weighted(
    terms: Sequence[tuple[float, Estimate]],
) -> Estimate:
    """Weighted sum of estimates; standard errors combined in quadrature.

    Cross-term covariance is ignored, which is conservative when streams
    are shared; the confidence multiplier absorbs the slack.
    """
    mean = sum(w * e.mean for w, e in terms)
    stderr = math.sqrt(sum((w * e.stderr) ** 2 for w, e in terms))
    replicates = min((e.replicates for _, e in terms), default=0)
    return Estimate(mean, stderr, replicates)


def agrees(lhs: Estimate, rhs: Estimate, multiplier: float) -> bool:
    """Combined-standard-error agreement test for two estimates."""
    tol = multiplier * math.hypot(lhs.stderr, rhs.stderr)
    return abs(lhs.mean - rhs.mean) <= tol


@dataclass
class ConfigBatch:
    """One batch of sampled Poisson configurations, as flat arrays.

    ``counts[i]`` points belong to replicate i; their coordinates are
    ``points[offsets[i]:offsets[i+1]]``.
    """

    counts: np.ndarray
    points: np.ndarray
    offsets: np.ndarray = field(init=False)

    def __post_init__(self):
        self.offsets = np.concatenate(([0], np.cumsum(self.counts)))

    def __len__(self) -> int:
        return len(self.counts)

    def replicate_points(self, i: int) -> np.ndarray:
        return self.points[self.offsets[i] : self.offsets[i + 1]]


def config_batches(
    space: MeasureSpace, mc: MCParams, tag: int = TAG_CONFIG
) -> Iterator[ConfigBatch]:
    """Sample Poisson(total_mass) point configurations in batches.

    Counts are Poisson with the space's total mass; given a count, points
    are i.i.d. from the normalized measure.  A zero-mass space yields empty
    configurations.
    """
    lam = space.total_mass
    for start in range(0, mc.replicates, mc.batch):
        m = min(mc.batch, mc.replicates - start)
        rng = stream_rng(mc.seed, tag, start)
        counts = rng.poisson(lam, size=m)
        total = int(counts.sum())
        points = (
            space.sample_points(rng, total) if total else np.empty(0, dtype=float)
        )
        yield ConfigBatch(counts=counts, points=points)


def point_batches(
    space: MeasureSpace, mc: MCParams, tag: int, per_replicate: int
) -> Iterator[np.ndarray]:
    """I.i.d. points from the normalized measure, `per_replicate` per row."""
    for start in range(0, mc.replicates, mc.batch):
        m = min(mc.batch, mc.replicates - start)
        rng = stream_rng(mc.seed, tag, start)
        if per_replicate == 0:
            yield np.empty((m, 0), dtype=float)
        else:
            flat = space.sample_points(rng, m * per_replicate)
            yield flat.reshape(m, per_replicate)
