"""Asymptotic restricted-isometry bounds for Gaussian matrices.

For an n x N matrix with i.i.d. N(0, 1/n) entries and k/n -> rho,
n/N -> delta, the lower and upper asymmetric RIP constants of order k are
bounded (with overwhelming probability) by

    L(delta, rho) = 1 - lambda_min(delta, rho)
    U(delta, rho) = min_{nu in [rho, 1]} lambda_max(delta, nu) - 1

where lambda_min / lambda_max are the zeros of the large-deviation rate
``delta * psi(lambda, rho) + H(rho * delta)`` below 1 - rho and above 1 + rho.

Every root found here can be audited with :func:`record_roots`.
"""
from __future__ import annotations

import contextvars
import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, NoRootError

__all__ = [
    "PhasePoint",
    "AsymptoticBounds",
    "RootLog",
    "record_roots",
    "shannon_entropy",
    "psi_min",
    "psi_max",
    "solve_lambda_min",
    "solve_lambda_max",
    "bound_L",
    "bound_U",
    "asymptotic_bounds",
]

RESIDUAL_TOL = 1e-10
LAMBDA_MIN_FLOOR = 1e-14
LAMBDA_MAX_CAP = 1e12
NU_POINTS = 256
NU_TOL = 1e-8

_RTOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class PhasePoint:
    """A point (delta, rho) = (n/N, k/n) of the phase plane.

    ``delta = 1`` (square matrices) is admitted because the oversampling
    constants are read off there.
    """

    delta: float
    rho: float

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0) or math.isnan(self.delta):
            raise DomainError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not (0.0 < self.rho < 1.0) or math.isnan(self.rho):
            raise DomainError(f"rho must lie in (0, 1), got {self.rho!r}")

    def scaled(self, a: float) -> "PhasePoint":
        return PhasePoint(self.delta, a * self.rho)


@dataclass(frozen=True)
class AsymptoticBounds:
    L: float
    U: float
    at: PhasePoint

    def __post_init__(self):
        if not 0.0 < self.L < 1.0:
            raise DomainError(f"L={self.L!r} outside (0, 1) at {self.at}")
        if not self.U > 0.0:
            raise DomainError(f"U={self.U!r} must be positive at {self.at}")


# ---------------------------------------------------------------------------
# root bookkeeping


@dataclass
class RootLog:
    """Running summary of every lambda root solved while the log is active."""

    count: int = 0
    max_residual: float = 0.0
    worst: tuple | None = None
    parent: "RootLog | None" = field(default=None, repr=False)

    def add(self, kind, delta, rho, lam, residual, count=1):
        self.count += count
        if self.worst is None or residual > self.max_residual:
            self.max_residual = residual
            self.worst = (kind, delta, rho, lam, residual)
        if self.parent is not None:
            self.parent.add(kind, delta, rho, lam, residual, count)


_ACTIVE_LOG: contextvars.ContextVar[RootLog | None] = contextvars.ContextVar(
    "sparsephase_root_log", default=None
)


@contextmanager
def record_roots():
    """Collect residuals of all lambda roots computed inside the block.

    Nested logs forward their entries to the enclosing one.
    """
    log = RootLog(parent=_ACTIVE_LOG.get())
    token = _ACTIVE_LOG.set(log)
    try:
        yield log
    finally:
        _ACTIVE_LOG.reset(token)


def _log_root(kind, delta, rho, lam, residual, count=1):
    log = _ACTIVE_LOG.get()
    if log is not None:
        log.add(kind, delta, rho, lam, residual, count)


# ---------------------------------------------------------------------------
# rate functions


def shannon_entropy(p: float) -> float:
    """Binary Shannon entropy with natural logarithms, H(0) = H(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"entropy argument must lie in [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def _entropy_vec(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    inside = (p > 0.0) & (p < 1.0)
    q = p[inside]
    out[inside] = -q * np.log(q) - (1.0 - q) * np.log1p(-q)
    return out


def _xlogx(x):
    return 0.0 if x == 0.0 else x * math.log(x)


def psi_min(lam: float, rho: float) -> float:
    """Large-deviation exponent for the smallest Wishart eigenvalue."""
    if not lam > 0.0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    return shannon_entropy(rho) + 0.5 * (
        (1.0 - rho) * math.log(lam) + 1.0 - rho + _xlogx(rho) - lam
    )


def psi_max(lam: float, rho: float) -> float:
    """Large-deviation exponent for the largest Wishart eigenvalue."""
    if not lam > 0.0:
        raise DomainError(f"lambda must be positive, got {lam!r}")
    return 0.5 * ((1.0 + rho) * math.log(lam) + 1.0 + rho - _xlogx(rho) - lam)


def _psi_max_vec(lam, rho):
    rho = np.asarray(rho, dtype=float)
    rlogr = np.where(rho > 0, rho * np.log(np.where(rho > 0, rho, 1.0)), 0.0)
    return 0.5 * ((1.0 + rho) * np.log(lam) + 1.0 + rho - rlogr - lam)


# ---------------------------------------------------------------------------
# lambda solvers on raw floats (rho may reach 1 for the nu-minimisation)


def _bisect(f, lo, hi):
    return optimize.bisect(f, lo, hi, xtol=1e-300, rtol=_RTOL, maxiter=5000)


def _lambda_min(delta, rho):
    h_rd = shannon_entropy(rho * delta)
    slope = 0.5 * delta * (1.0 - rho)
    const = delta * (shannon_entropy(rho) + 0.5 * (1.0 - rho + _xlogx(rho))) + h_rd

    def f(lam):
        return slope * math.log(lam) - 0.5 * delta * lam + const

    hi = 1.0 - rho
    if not f(hi) > 0.0:
        raise NoRootError(
            f"lambda_min: no sign change at upper end 1-rho for delta={delta}, rho={rho}"
        )
    lo = LAMBDA_MIN_FLOOR
    while f(lo) >= 0.0:
        lo *= LAMBDA_MIN_FLOOR
        if lo < 1e-290:
            raise NoRootError(
                f"lambda_min: bracket (0, 1-rho] is sign-definite for "
                f"delta={delta}, rho={rho}"
            )
    lam = _bisect(f, lo, hi)
    residual = abs(delta * psi_min(lam, rho) + h_rd)
    _check_residual("lambda_min", delta, rho, lam, residual)
    return lam


def _lambda_max(delta, rho):
    h_rd = shannon_entropy(rho * delta)
    slope = 0.5 * delta * (1.0 + rho)
    const = 0.5 * delta * (1.0 + rho - _xlogx(rho)) + h_rd

    def g(lam):
        return slope * math.log(lam) - 0.5 * delta * lam + const

    lo = 1.0 + rho
    hi = 2.0 * lo
    while g(hi) >= 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > LAMBDA_MAX_CAP:
            raise NoRootError(
                f"lambda_max: no sign change below cap {LAMBDA_MAX_CAP:g} for "
                f"delta={delta}, rho={rho}"
            )
    lam = _bisect(g, lo, hi)
    residual = abs(delta * psi_max(lam, rho) + h_rd)
    _check_residual("lambda_max", delta, rho, lam, residual)
    return lam


def _check_residual(kind, delta, rho, lam, residual, count=1):
    _log_root(kind, delta, rho, lam, residual, count)
    if not residual <= RESIDUAL_TOL:
        raise NoRootError(
            f"{kind}: residual {residual:.3e} exceeds {RESIDUAL_TOL:g} "
            f"at delta={delta}, rho={rho}"
        )


def _lambda_max_vec(delta, nus):
    """Vectorised bisection for lambda_max over an array of rho values."""
    nus = np.asarray(nus, dtype=float)
    h_rd = _entropy_vec(nus * delta)
    slope = 0.5 * delta * (1.0 + nus)
    rlogr = np.where(nus > 0, nus * np.log(np.where(nus > 0, nus, 1.0)), 0.0)
    const = 0.5 * delta * (1.0 + nus - rlogr) + h_rd

    def g(lam):
        return slope * np.log(lam) - 0.5 * delta * lam + const

    lo = 1.0 + nus
    hi = 2.0 * lo
    pos = g(hi) >= 0.0
    while pos.any():
        lo = np.where(pos, hi, lo)
        hi = np.where(pos, 2.0 * hi, hi)
        if hi.max() > LAMBDA_MAX_CAP:
            raise NoRootError(
                f"lambda_max: no sign change below cap {LAMBDA_MAX_CAP:g} for delta={delta}"
            )
        pos = g(hi) >= 0.0
    # g(lo) > 0 > g(hi) throughout
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        up = g(mid) > 0.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
        if np.all(hi - lo <= _RTOL * hi):
            break
    lam = 0.5 * (lo + hi)
    residual = np.abs(delta * _psi_max_vec(lam, nus) + h_rd)
    worst = int(np.argmax(residual))
    _check_residual("lambda_max", delta, float(nus[worst]), float(lam[worst]),
                    float(residual[worst]), count=len(nus))
    return lam


# ---------------------------------------------------------------------------
# public API


def solve_lambda_min(at: PhasePoint) -> float:
    """Root of ``delta*psi_min(lambda, rho) + H(rho*delta)`` in (0, 1-rho].

    Raises
    ------
    NoRootError
        If the bracket stays sign-definite after pushing its lower end
        towards zero.
    """
    return _lambda_min(at.delta, at.rho)


def solve_lambda_max(at: PhasePoint) -> float:
    """Root of ``delta*psi_max(lambda, rho) + H(rho*delta)`` at or above 1+rho."""
    return _lambda_max(at.delta, at.rho)


def bound_L(at: PhasePoint) -> float:
    """Asymptotic bound on the lower aRIP constant, ``1 - lambda_min``."""
    L = 1.0 - solve_lambda_min(at)
    if not L < 1.0:
        raise DomainError(f"L rounds to 1 at {at}; lambda_min underflows")
    return L


def bound_U(at: PhasePoint, nu_points: int = NU_POINTS, nu_tol: float = NU_TOL) -> float:
    """Asymptotic bound on the upper aRIP constant.

    ``lambda_max(delta, nu)`` is sampled on ``nu_points`` values spanning
    [rho, 1]; the best cell is then refined with a bounded scalar
    minimisation to ``nu_tol`` in nu. The coarse scan matters because
    lambda_max need not be monotone in nu when delta is large.
    """
    delta, rho = at.delta, at.rho
    nus = np.linspace(rho, 1.0, nu_points)
    lams = _lambda_max_vec(delta, nus)
    i = int(np.argmin(lams))
    best = float(lams[i])
    a = nus[max(i - 1, 0)]
    b = nus[min(i + 1, nu_points - 1)]
    if b - a > nu_tol:
        res = optimize.minimize_scalar(
            lambda nu: _lambda_max(delta, nu),
            bounds=(a, b),
            method="bounded",
            options={"xatol": nu_tol},
        )
        best = min(best, float(res.fun))
    return best - 1.0


def asymptotic_bounds(at: PhasePoint, **kwargs) -> AsymptoticBounds:
    return AsymptoticBounds(L=bound_L(at), U=bound_U(at, **kwargs), at=at)
