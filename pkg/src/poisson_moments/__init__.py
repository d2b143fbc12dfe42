"""Moment identities for Poisson stochastic integrals.

Exact set-partition combinatorics on one side, Poisson point-process
simulation on the other: every identity is checked either as an exact
polynomial identity or as a Monte Carlo agreement test with confidence
intervals.
"""

__version__ = "0.1.0"

from .partitions import (
    DEFAULT_ENUMERATION_CAP,
    Profile,
    SetPartition,
    bell_number,
    bell_polynomial,
    coefficient_big_c,
    coefficient_big_c_checked,
    partition_profiles,
    profile_count,
    set_partitions,
    stirling2,
    stirling2_no_singletons,
    stirling_from_compositions,
)
from .polynomials import Polynomial
from .errors import (
    EnumerationTooLarge,
    IdentityViolation,
    InternalConsistencyError,
    TruncationError,
)
from .measure import (
    DeterministicIntegrand,
    MeasureSpace,
    space_from_config,
)
from .estimation import Estimate, MCParams
from .process import (
    Configuration,
    Functional,
    RandomIntegrand,
    add_points,
    difference_gradient,
    pathwise_integral,
    sample_configuration,
    skorohod_integral,
    verify_duality,
)
from .registry import make_functional, make_integrand
from .moments import (
    centered_moment_deterministic,
    compensated_moment_identity,
    count_integrand_exact,
    moment_deterministic,
    moment_random_lhs,
    moment_random_rhs,
    poisson_shifted_moment_poly,
    skorohod_moment_lhs,
    skorohod_moment_rhs,
    verify_random_identity,
    verify_skorohod_identity,
)
from .identities import (
    CountFunction,
    centered_poisson_moment,
    covariance_identity,
    exponential_identity,
    stirling_moment_identity,
    stirling_moment_polynomials,
)
from .report import IdentityReport, TermEstimate
