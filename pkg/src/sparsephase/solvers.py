"""CoSaMP, Subspace Pursuit and Iterative Hard Thresholding.

All three are support-recovery loops built from two primitives: hard
thresholding (keep the m largest magnitudes) and least squares restricted to
a column subset. The exact stopping rule ``||y^l|| = 0`` is replaced by
``||y^l|| <= residual_tolerance``; with noisy data the loop also stops once the
residual no longer shrinks by ``stall_factor``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionError, RankDeficiencyError

__all__ = [
    "RecoveryOptions",
    "RecoveryResult",
    "Termination",
    "hard_threshold_support",
    "least_squares_on_support",
    "cosamp",
    "subspace_pursuit",
    "iht",
    "SOLVERS",
    "solve",
]

RANK_RTOL = 1e-12
DEFAULT_OMEGA = 0.65


class Termination(str, Enum):
    RESIDUAL_ZERO = "residual-zero"
    STALLED = "stalled"
    MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class RecoveryOptions:
    """Loop controls shared by the three solvers.

    ``max_iterations=None`` means ``min(100 * k, 3000)``;
    ``residual_tolerance=None`` means ``1e-10 * ||y||``. ``omega`` and
    ``debias`` only affect IHT.
    """

    max_iterations: int | None = None
    residual_tolerance: float | None = None
    stall_factor: float = 0.999
    omega: float = DEFAULT_OMEGA
    debias: bool = True

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_tolerance is not None and self.residual_tolerance < 0:
            raise ValueError("residual_tolerance must be >= 0")
        if not 0.0 < self.stall_factor <= 1.0:
            raise ValueError("stall_factor must lie in (0, 1]")
        if not 0.0 < self.omega < 2.0:
            raise ValueError("omega must lie in (0, 2)")

    def iteration_cap(self, k: int) -> int:
        return self.max_iterations if self.max_iterations is not None else min(100 * k, 3000)

    def tolerance(self, y_norm: float) -> float:
        if self.residual_tolerance is not None:
            return self.residual_tolerance
        return 1e-10 * y_norm


@dataclass
class RecoveryResult:
    estimate: np.ndarray
    support: np.ndarray
    iterations: int
    residual_trace: list[float] = field(default_factory=list)
    termination: Termination = Termination.MAX_ITERATIONS

    def to_dict(self):
        return {
            "estimate": self.estimate.tolist(),
            "support": self.support.tolist(),
            "iterations": self.iterations,
            "residual_trace": list(self.residual_trace),
            "termination": self.termination.value,
        }


def hard_threshold_support(v, m: int) -> np.ndarray:
    """Indices of the ``m`` largest-magnitude entries of ``v``, sorted.

    Ties go to the lowest index.
    """
    v = np.asarray(v)
    if not 1 <= m <= v.size:
        raise DimensionError(f"threshold size {m} outside 1..{v.size}")
    order = np.argsort(-np.abs(v), kind="stable")
    return np.sort(order[:m])


def least_squares_on_support(A, I, y) -> np.ndarray:
    """Minimiser of ``||A[:, I] z - y||``; raises on numerical rank loss."""
    A = np.asarray(A, dtype=float)
    I = np.asarray(I, dtype=int)
    if I.size > A.shape[0]:
        raise DimensionError(f"support size {I.size} exceeds row count {A.shape[0]}")
    if I.size == 0:
        return np.zeros(0)
    z, _, _, s = np.linalg.lstsq(A[:, I], y, rcond=None)
    if s[-1] < RANK_RTOL * s[0] or s[0] == 0.0:
        raise RankDeficiencyError(
            f"columns {I.tolist()} are rank deficient (sigma ratio {s[-1] / max(s[0], 1e-300):.2e})"
        )
    return z


def _check_inputs(A, y, k):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if A.ndim != 2:
        raise DimensionError("A must be a 2-d array")
    n, N = A.shape
    if y.size != n:
        raise DimensionError(f"y has length {y.size} but A has {n} rows")
    if not 1 <= k <= min(n, N):
        raise DimensionError(f"k={k} must lie in 1..{min(n, N)}")
    return A, y, n, N


def _embed(N, support, values):
    x = np.zeros(N)
    x[support] = values
    return x


class _Stopper:
    def __init__(self, y, k, opts):
        self.tol = opts.tolerance(float(np.linalg.norm(y)))
        self.cap = opts.iteration_cap(k)
        self.stall = opts.stall_factor
        self.trace = []
        self.previous = float(np.linalg.norm(y))

    def done(self, residual_norm):
        """Record one iteration's residual; return a Termination or None."""
        self.trace.append(residual_norm)
        if residual_norm <= self.tol:
            return Termination.RESIDUAL_ZERO
        if residual_norm > self.stall * self.previous:
            return Termination.STALLED
        self.previous = residual_norm
        if len(self.trace) >= self.cap:
            return Termination.MAX_ITERATIONS
        return None


def cosamp(A, y, k: int, opts: RecoveryOptions | None = None,
           callback=None) -> RecoveryResult:
    """Compressive Sampling Matching Pursuit.

    Each iteration merges the previous support with the 2k largest entries
    of the proxy ``A^T r``, solves least squares on the union, prunes to the
    k largest coefficients and recomputes the residual from them.

    ``callback(l, x_l)``, if given, sees every iterate.
    """
    opts = opts or RecoveryOptions()
    A, y, n, N = _check_inputs(A, y, k)
    if 4 * k > n:
        warnings.warn(f"CoSaMP with 4k={4 * k} > n={n}; guarantees need 4k <= n",
                      stacklevel=2)
    stop = _Stopper(y, k, opts)
    support = np.zeros(0, dtype=int)
    if np.linalg.norm(y) <= stop.tol:
        return RecoveryResult(np.zeros(N), support, 0, [], Termination.RESIDUAL_ZERO)
    residual = y
    values = np.zeros(0)
    clamp_warned = False
    while True:
        proxy = A.T @ residual
        fresh = hard_threshold_support(proxy, min(2 * k, N))
        merged = np.union1d(support, fresh)
        if merged.size > n:
            # keep the old support and the strongest new indices, n in total
            extra = np.setdiff1d(merged, support)
            extra = extra[np.argsort(-np.abs(proxy[extra]), kind="stable")][: n - support.size]
            merged = np.union1d(support, extra)
            if not clamp_warned:
                warnings.warn(f"CoSaMP merged support clamped to n={n} columns",
                              stacklevel=2)
                clamp_warned = True
        z = least_squares_on_support(A, merged, y)
        keep = hard_threshold_support(z, k)
        support, values = merged[keep], z[keep]
        residual = y - A[:, support] @ values
        if callback is not None:
            callback(len(stop.trace) + 1, _embed(N, support, values))
        reason = stop.done(float(np.linalg.norm(residual)))
        if reason is not None:
            break
    return RecoveryResult(_embed(N, support, values), support, len(stop.trace),
                          stop.trace, reason)


def subspace_pursuit(A, y, k: int, opts: RecoveryOptions | None = None,
                     callback=None) -> RecoveryResult:
    """Subspace Pursuit.

    Like CoSaMP but merges only k new indices, and both the residual and the
    final estimate come from a least-squares projection onto the k-support.
    """
    opts = opts or RecoveryOptions()
    A, y, n, N = _check_inputs(A, y, k)
    if 3 * k > n:
        warnings.warn(f"SP with 3k={3 * k} > n={n}; guarantees need 3k <= n",
                      stacklevel=2)
    stop = _Stopper(y, k, opts)
    if np.linalg.norm(y) <= stop.tol:
        return RecoveryResult(np.zeros(N), np.zeros(0, dtype=int), 0, [],
                              Termination.RESIDUAL_ZERO)
    support = hard_threshold_support(A.T @ y, k)
    coef = least_squares_on_support(A, support, y)
    residual = y - A[:, support] @ coef
    if callback is not None:
        callback(0, _embed(N, support, coef))
    if np.linalg.norm(residual) <= stop.tol:
        return RecoveryResult(_embed(N, support, coef), support, 0, [],
                              Termination.RESIDUAL_ZERO)
    stop.previous = float(np.linalg.norm(residual))
    while True:
        fresh = hard_threshold_support(A.T @ residual, k)
        merged = np.union1d(support, fresh)
        z = least_squares_on_support(A, merged, y)
        candidate = merged[hard_threshold_support(z, k)]
        candidate_coef = least_squares_on_support(A, candidate, y)
        candidate_residual = y - A[:, candidate] @ candidate_coef
        if callback is not None:
            callback(len(stop.trace) + 1, _embed(N, candidate, candidate_coef))
        reason = stop.done(float(np.linalg.norm(candidate_residual)))
        if reason is Termination.STALLED:
            # the new support is no better; report the previous one
            break
        support, coef, residual = candidate, candidate_coef, candidate_residual
        if reason is not None:
            break
    return RecoveryResult(_embed(N, support, coef), support, len(stop.trace),
                          stop.trace, reason)


def iht(A, y, k: int, opts: RecoveryOptions | None = None,
        callback=None) -> RecoveryResult:
    """Iterative Hard Thresholding with fixed step ``opts.omega``.

    ``x^l = H_k(x^{l-1} + omega A^T (y - A x^{l-1}))``. With ``debias`` the
    final support is refitted by least squares.
    """
    opts = opts or RecoveryOptions()
    A, y, n, N = _check_inputs(A, y, k)
    stop = _Stopper(y, k, opts)
    if np.linalg.norm(y) <= stop.tol:
        return RecoveryResult(np.zeros(N), np.zeros(0, dtype=int), 0, [],
                              Termination.RESIDUAL_ZERO)
    x = np.zeros(N)
    residual = y
    while True:
        step = x + opts.omega * (A.T @ residual)
        support = hard_threshold_support(step, k)
        x = _embed(N, support, step[support])
        residual = y - A[:, support] @ x[support]
        if callback is not None:
            callback(len(stop.trace) + 1, x.copy())
        reason = stop.done(float(np.linalg.norm(residual)))
        if reason is not None:
            break
    if opts.debias and k <= n:
        try:
            x = _embed(N, support, least_squares_on_support(A, support, y))
        except RankDeficiencyError:
            pass
    return RecoveryResult(x, support, len(stop.trace), stop.trace, reason)


SOLVERS = {"cosamp": cosamp, "sp": subspace_pursuit, "iht": iht}


def solve(alg: str, A, y, k: int, opts: RecoveryOptions | None = None,
          callback=None) -> RecoveryResult:
    key = getattr(alg, "value", alg)
    if key not in SOLVERS:
        raise ValueError(f"no solver for {key!r}; choose from {sorted(SOLVERS)}")
    return SOLVERS[key](A, y, k, opts, callback)
