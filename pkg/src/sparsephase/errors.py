"""Exception types raised across the package."""


class SparsePhaseError(Exception):
    """Base class for all package errors."""


class DomainError(SparsePhaseError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class DimensionError(SparsePhaseError, ValueError):
    """Array shapes or index sets are inconsistent."""


class NoRootError(SparsePhaseError):
    """A bracketing root search found no sign change."""


class DomainExhaustedError(SparsePhaseError):
    """A level set is not reached anywhere on the admissible interval."""


class CombinatorialBlowupError(SparsePhaseError):
    """Exhaustive subset enumeration would exceed the configured guard."""


class RankDeficiencyError(SparsePhaseError, ArithmeticError):
    """A least-squares subproblem is numerically rank deficient."""


class UndefinedRatioError(SparsePhaseError, ArithmeticError):
    """The stability ratio xi / (1 - mu) is requested with mu >= 1."""
