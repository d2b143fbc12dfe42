"""Independent oracles: brute-force routes the package must reproduce.

Everything here is deliberately written without the package's enumeration
or counting machinery, so agreement is a genuine cross-check.
"""

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def insert_partitions(n):
    """All partitions of {1..n} by inserting element n into partitions of
    {1..n-1}; blocks and block lists are returned sorted."""
    if n == 0:
        return ((),)
    out = []
    for smaller in insert_partitions(n - 1):
        for i in range(len(smaller)):
            enlarged = [list(b) for b in smaller]
            enlarged[i].append(n)
            out.append(
                tuple(sorted((tuple(b) for b in enlarged), key=lambda b: b[0]))
            )
        out.append(
            tuple(sorted([tuple(b) for b in smaller] + [(n,)], key=lambda b: b[0]))
        )
    return tuple(out)


def bell_triangle(n):
    """Bell number via the triangle recurrence."""
    row = [1]
    for _ in range(n):
        new = [row[-1]]
        for value in row:
            new.append(new[-1] + value)
        row = new
    return row[0]


@lru_cache(maxsize=None)
def assoc_stirling2(n, k):
    """Blocks-of-size->=2 Stirling numbers by their own recurrence:
    S2(n,k) = k*S2(n-1,k) + (n-1)*S2(n-2,k-1)."""
    if n < 0 or k < 0:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    if n == 1:
        return 0
    return k * assoc_stirling2(n - 1, k) + (n - 1) * assoc_stirling2(n - 2, k - 1)


def brute_moment_from_powers(power_ints, n):
    """Moment as a direct sum over brute-force partitions, exact in the
    given (Fraction) power integrals; power_ints[k-1] is the k-th power."""
    total = Fraction(0)
    for partition in insert_partitions(n):
        term = Fraction(1)
        for block in partition:
            term *= power_ints[len(block) - 1]
        total += term
    return total


def brute_centered_moment_from_powers(power_ints, n):
    """Same sum restricted to partitions with every block of size >= 2."""
    total = Fraction(0)
    for partition in insert_partitions(n):
        if any(len(block) < 2 for block in partition):
            continue
        term = Fraction(1)
        for block in partition:
            term *= power_ints[len(block) - 1]
        total += term
    return total


def monomial_power_integrals(n_max):
    """Exact power integrals of x on [0,1] under the unit uniform measure."""
    return [Fraction(1, k + 1) for k in range(1, n_max + 1)]
