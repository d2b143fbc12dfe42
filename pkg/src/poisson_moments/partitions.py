"""Set-partition combinatorics in exact integer arithmetic.

Everything here is a counting or enumeration primitive used by the moment
engines: partitions of {1..n} (enumerated as restricted growth strings),
block-size profiles and the number of partitions realizing a profile,
Stirling numbers of the second kind (with and without singleton blocks),
Bell polynomials, and the singleton-extension coefficient that appears in
the compensated moment expansion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import EnumerationTooLarge, InternalConsistencyError
from .polynomials import Polynomial

#: Largest ground-set size for which full set-partition enumeration is
#: allowed by default (Bell(12) = 4,213,597 partitions).
DEFAULT_ENUMERATION_CAP = 12


@dataclass(frozen=True, slots=True)
class SetPartition:
    """A partition of {1..n} into disjoint non-empty blocks.

    Blocks are stored sorted internally and ordered by smallest element,
    which is the canonical enumeration order.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if any(b in seen for b in block):
                raise ValueError("blocks are not disjoint")
            seen.update(block)
        if seen != set(range(1, self.n + 1)):
            raise ValueError("blocks do not cover {1..n}")
        mins = [block[0] for block in self.blocks]
        if mins != sorted(mins):
            raise ValueError("blocks not in canonical (min-element) order")

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def profile(self) -> "Profile":
        return Profile.of(len(block) for block in self.blocks)


@dataclass(frozen=True, slots=True)
class Profile:
    """A multiset of block sizes (stored non-increasing); ``n`` is their sum."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if any(s < 1 for s in self.sizes):
            raise ValueError("block sizes must be >= 1")
        if tuple(sorted(self.sizes, reverse=True)) != self.sizes:
            raise ValueError("sizes must be stored non-increasing")

    @classmethod
    def of(cls, sizes) -> "Profile":
        return cls(tuple(sorted(sizes, reverse=True)))

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def block_count(self) -> int:
        return len(self.sizes)


def set_partitions(n: int, cap: int | None = None) -> Iterator[SetPartition]:
    """Yield every partition of {1..n} exactly once, in canonical order.

    Partitions are generated as restricted growth strings: a[0] = 0 and
    a[i] <= 1 + max(a[:i]), where a[i] is the (0-based) index of the block
    containing element i+1.  The induced order lists blocks by smallest
    element, lexicographically in the growth string.

    n = 0 yields the single empty partition.  Raises
    :class:`EnumerationTooLarge` if n exceeds ``cap`` (default 12).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    limit = DEFAULT_ENUMERATION_CAP if cap is None else cap
    if n > limit:
        raise EnumerationTooLarge(
            f"enumeration too large: {n} elements exceeds cap {limit}"
        )
    if n == 0:
        yield SetPartition(0, ())
        return

    growth = [0] * n
    maxima = [0] * n  # maxima[i] = 1 + max(growth[:i+1])

    def emit() -> SetPartition:
        blocks: list[list[int]] = [[] for _ in range(maxima[n - 1])]
        for element, label in enumerate(growth, start=1):
            blocks[label].append(element)
        return SetPartition(n, tuple(tuple(b) for b in blocks))

    maxima[0] = 1
    i = n - 1
    while True:
        for j in range(1, n):
            maxima[j] = max(maxima[j - 1], growth[j] + 1)
        yield emit()
        # advance: rightmost position that can still grow
        i = n - 1
        while i > 0 and growth[i] >= maxima[i - 1]:
            growth[i] = 0
            i -= 1
        if i == 0:
            return
        growth[i] += 1


def profile_count(profile: Profile | Sequence[int]) -> int:
    """Number of partitions of an n-set realizing the given size profile.

    Equals n! / (prod_i l_i! * prod_m r_m!) where r_m is the multiplicity
    of size m among the l_i.  The empty profile counts the single partition
    of the empty set, i.e. 1.
    """
    sizes = profile.sizes if isinstance(profile, Profile) else tuple(profile)
    n = sum(sizes)
    denom = 1
    for size in sizes:
        denom *= math.factorial(size)
    mult: dict[int, int] = {}
    for size in sizes:
        mult[size] = mult.get(size, 0) + 1
    for r in mult.values():
        denom *= math.factorial(r)
    count, rem = divmod(math.factorial(n), denom)
    if rem:
        raise InternalConsistencyError("profile count is not an integer")
    return count


def integer_partitions(
    n: int, min_part: int = 1, max_part: int | None = None
) -> Iterator[tuple[int, ...]]:
    """Yield the partitions of the integer n into parts >= min_part, non-increasing."""
    if n < 0:
        raise ValueError("n must be >= 0")
    first = n if max_part is None else min(n, max_part)

    def rec(remaining: int, largest: int, prefix: tuple[int, ...]):
        if remaining == 0:
            yield prefix
            return
        for part in range(min(largest, remaining), min_part - 1, -1):
            yield from rec(remaining - part, part, prefix + (part,))

    yield from rec(n, first, ())


def partition_profiles(n: int, min_block: int = 1) -> Iterator[Profile]:
    """Yield every block-size profile of a partition of {1..n} (blocks >= min_block)."""
    for sizes in integer_partitions(n, min_part=min_block):
        yield Profile(sizes)


def _nested_singleton_sum(sizes: tuple[int, ...], c: int) -> int:
    """Nested binomial sum for one arrangement of the block sizes.

    Blocks are laid out in k+c slots ordered by maximal element: the c
    singleton slots are chosen by strictly increasing markers
    0 = t_0 < t_1 < ... < t_c < t_{c+1} = k+c+1, and the sized blocks fill
    the remaining slots left to right in the given arrangement.  A block at
    non-singleton index p with q singleton slots before it contributes

        binom(L_p + q - 1, L_{p-1} + q),   L_p = l_1 + ... + l_p,

    which chooses the block's non-maximal elements among everything placed
    so far.  Summing the products over all marker choices counts the
    layouts realizing this arrangement.
    """
    k = len(sizes)
    b = k + c
    prefix = [0] * (k + 1)
    for i, size in enumerate(sizes, start=1):
        prefix[i] = prefix[i - 1] + size

    total = 0
    for markers in itertools.combinations(range(1, b + 1), c):
        t = (0,) + markers + (b + 1,)
        term = 1
        for q in range(c + 1):
            lo = t[q] - q + 1
            hi = t[q + 1] - q - 1
            for p in range(lo, hi + 1):
                term *= math.comb(prefix[p] + q - 1, prefix[p - 1] + q)
            if term == 0:
                break
        total += term
    return total


def _distinct_arrangements(sizes: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """Distinct orderings of a size multiset, lexicographically descending."""
    sizes = tuple(sorted(sizes, reverse=True))
    if not sizes:
        yield ()
        return
    seen_first: set[int] = set()
    for i, first in enumerate(sizes):
        if first in seen_first:
            continue
        seen_first.add(first)
        rest = sizes[:i] + sizes[i + 1 :]
        for tail in _distinct_arrangements(rest):
            yield (first,) + tail


def coefficient_big_c(profile: Profile | Sequence[int], c: int) -> int:
    """Singleton-extension coefficient for a profile (l_1..l_k) and c >= 0.

    Counts partitions of a set of n = l_1 + ... + l_k + c elements into k
    blocks of sizes l_1..l_k plus c distinguished singletons, evaluated as
    the nested marker sum of :func:`_nested_singleton_sum` accumulated over
    the distinct arrangements of the size multiset.  The value must equal
    binom(n, c) * profile_count(profile); both routes are exposed, and
    :func:`coefficient_big_c_checked` enforces their agreement.
    """
    sizes = profile.sizes if isinstance(profile, Profile) else tuple(profile)
    if c < 0:
        raise ValueError("c must be >= 0")
    if any(s < 1 for s in sizes):
        raise ValueError("block sizes must be >= 1")
    return sum(
        _nested_singleton_sum(arrangement, c)
        for arrangement in _distinct_arrangements(sizes)
    )


def coefficient_big_c_checked(profile: Profile | Sequence[int], c: int) -> int:
    """Literal coefficient with the counting identity enforced.

    Raises :class:`InternalConsistencyError` when the nested-sum value and
    binom(n, c) * profile_count disagree; the discrepancy is surfaced, never
    patched.
    """
    sizes = profile.sizes if isinstance(profile, Profile) else tuple(profile)
    literal = coefficient_big_c(sizes, c)
    n = sum(sizes) + c
    expected = math.comb(n, c) * profile_count(sizes)
    if literal != expected:
        raise InternalConsistencyError(
            f"coefficient mismatch for profile {sizes}, c={c}: "
            f"nested sum {literal} != binom({n},{c})*N = {expected}"
        )
    return literal


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k).

    Number of partitions of an n-set into k non-empty blocks, computed by
    the recurrence S(n,k) = k*S(n-1,k) + S(n-1,k-1).  By convention
    S(n,k) = 0 for k > n or k < 0 (and S(0,0) = 1).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if k < 0 or k > n:
        return 0
    if n == 0:
        return 1
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def stirling2_no_singletons(n: int, k: int) -> int:
    """Partitions of an n-set into k blocks, every block of size >= 2.

    Computed as the profile sum: for each size profile of n with k parts
    all >= 2, add the number of partitions with that profile.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be >= 0")
    if n == 0:
        return 1 if k == 0 else 0
    total = 0
    for sizes in integer_partitions(n, min_part=2):
        if len(sizes) == k:
            total += profile_count(sizes)
    return total


def bell_number(n: int) -> int:
    """Total number of partitions of an n-set."""
    return sum(stirling2(n, k) for k in range(n + 1))


def bell_polynomial(n: int) -> Polynomial:
    """B_n as a polynomial: coefficient of power k is S(n, k).

    Evaluated at the mean of a Poisson variable it gives that variable's
    n-th raw moment; at 1 it gives the Bell number.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    return Polynomial(tuple(stirling2(n, k) for k in range(n + 1)))


def stirling_from_compositions(n: int, k: int) -> int:
    """S(n, k) via the block-size multiplicity (composition) sum.

    Evaluates n! * sum over multiplicity vectors (r_1, ..., r_n) with
    sum m*r_m = n and sum r_m = k of prod_m 1/((m!)^{r_m} r_m!), in exact
    rational arithmetic.  The result must be an integer; a fractional
    remainder raises :class:`InternalConsistencyError`.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be >= 0")
    if n == 0:
        return 1 if k == 0 else 0
    total = Fraction(0)
    for sizes in integer_partitions(n, min_part=1):
        if len(sizes) != k:
            continue
        mult: dict[int, int] = {}
        for size in sizes:
            mult[size] = mult.get(size, 0) + 1
        term = Fraction(1)
        for m, r in mult.items():
            term /= Fraction(math.factorial(m)) ** r * math.factorial(r)
        total += term
    total *= math.factorial(n)
    if total.denominator != 1:
        raise InternalConsistencyError(
            f"composition sum for S({n},{k}) is not an integer: {total}"
        )
    return int(total)
