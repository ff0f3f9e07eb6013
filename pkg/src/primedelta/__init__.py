"""Exact and streamed computations around the divisor problem error term Delta(x)."""

from ._backend import backend_name, set_backend, using_numba
from .errors import (
    BudgetExceeded,
    CheckpointError,
    ConvergenceError,
    DomainError,
    PreconditionError,
    PrimeDeltaError,
    SizingError,
)
from .expsums import (
    BilinearInstance,
    PhaseFunction,
    TypeSumInstance,
    double_large_sieve_check,
    exp_integral,
    exp_sum,
    first_derivative_check,
    second_derivative_ratio,
    sum_to_integral_residual,
    type_sum_eval,
)
from .identities import heath_brown_rhs, verify_heath_brown
from .moments import (
    SweepReport,
    constant_C,
    continuous_mean_square,
    discrete_mean_square,
    furuya_check,
    prime_moment_sweep,
    shifted_delta_moment,
)
from .sieves import DivisorSegment, primes_in, sieve_segment
from .spacing import (
    SpacingInstance,
    T_sum,
    count_close_pairs,
    count_quadruplets_N,
    count_spacing_B,
    pair_proximity_check,
    proposition_bound,
    t_value,
)
from .summatory import DeltaSample, delta, delta_stream, divisor_summatory
from .voronoi import delta1, delta2, voronoi_residual_stats

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
