"""Asymmetric RIP bounds, recovery phase transitions and greedy sparse solvers."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CombinatorialBlowupError,
    DimensionError,
    DomainError,
    DomainExhaustedError,
    NoRootError,
    RankDeficiencyError,
    SparsePhaseError,
    UndefinedRatioError,
)
from .experiment import (  # noqa: E402
    SuccessGrid,
    TrialSpec,
    gaussian_matrix,
    run_trial,
    sparse_signal,
    success_grid,
)
from .factors import (  # noqa: E402
    AlgorithmId,
    AsymptoticBoundsProvider,
    FactorSet,
    FiniteBoundsProvider,
    FixedBoundsProvider,
    factors_for,
    max_iterations,
    romp_factor,
    romp_threshold,
)
from .rip_asymptotic import (  # noqa: E402
    PhasePoint,
    asymptotic_bounds,
    bound_L,
    bound_U,
    record_roots,
)
from .rip_finite import (  # noqa: E402
    FiniteAripBounds,
    ProblemSize,
    estimate_arip_lower,
    exact_arip,
    verify_arip_implications,
)
from .solvers import RecoveryOptions, RecoveryResult, cosamp, iht, solve, subspace_pursuit  # noqa: E402
from .transition import rho_star, stability_level_curve, transition_curve  # noqa: E402
