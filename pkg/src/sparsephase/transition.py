"""Recovery phase-transition curves and stability level curves.

``rho_star(alg, delta)`` is the largest rho at which the algorithm's
convergence factor mu(delta, rho) still sits below 1 (more generally the rho
where mu hits ``target``). mu increases strictly in rho, so the level set is
a single point and bisection on a sign-checked bracket finds it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, DomainExhaustedError, NoRootError, SparsePhaseError
from .factors import MULTIPLES, AlgorithmId, AsymptoticBoundsProvider, factors_for
from .rip_asymptotic import record_roots

__all__ = [
    "TransitionPoint",
    "TransitionTable",
    "mu_level",
    "stability_level",
    "rho_star",
    "transition_curve",
    "stability_level_curve",
    "default_delta_grid",
    "CURVE_ALGORITHMS",
]

LEVEL_TOL = 1e-6
RHO_FLOOR = 1e-12
CURVE_ALGORITHMS = (AlgorithmId.COSAMP, AlgorithmId.SP, AlgorithmId.IHT, AlgorithmId.L1)


def default_delta_grid(points: int = 50, lo: float = 1e-3, hi: float = 1.0):
    return np.geomspace(lo, hi, points)


def mu_level(alg, delta: float, rho: float, **bounds_kwargs) -> float:
    """mu^alg(delta, rho); +inf where the factor is undefined (some L >= 1).

    ``bounds_kwargs`` go to ``AsymptoticBoundsProvider`` (e.g. ``nu_points``).
    """
    try:
        return factors_for(alg, AsymptoticBoundsProvider(delta, rho, **bounds_kwargs)).mu
    except (DomainError, NoRootError):
        return math.inf


def stability_level(alg, delta: float, rho: float) -> float:
    """xi/(1 - mu) at (delta, rho); +inf once mu >= 1 or bounds are undefined."""
    try:
        f = factors_for(alg, AsymptoticBoundsProvider(delta, rho))
    except (DomainError, NoRootError):
        return math.inf
    return f.stability if f.mu < 1.0 else math.inf


def _rho_ceiling(alg) -> float:
    # every multiple a*rho must stay inside (0, 1)
    return (1.0 - 1e-9) / max(MULTIPLES[AlgorithmId(alg)])


def _solve_level(level, target, lo, hi, tol):
    """Geometric bisection for level(rho) = target on [lo, hi].

    ``level`` must be increasing, with level(lo) < target <= level(hi);
    the caller guarantees the straddle. Returns (rho, level(rho)).
    """
    f_lo = level(lo)
    f_hi = level(hi)
    if not (f_lo < target <= f_hi):
        raise DomainExhaustedError(
            f"bracket [{lo:g}, {hi:g}] does not straddle level {target}: "
            f"values {f_lo!r}, {f_hi!r}"
        )
    inner_tol = 1e-2 * tol
    while True:
        if abs(f_lo - target) <= inner_tol:
            return lo, f_lo
        if math.isfinite(f_hi) and abs(f_hi - target) <= inner_tol:
            return hi, f_hi
        if hi - lo <= 4e-16 * hi:
            break
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            mid = 0.5 * (lo + hi)
        f_mid = level(mid)
        if f_mid < target:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    # bracket collapsed; accept the closer finite side if within tolerance
    best = min(((lo, f_lo), (hi, f_hi)), key=lambda p: abs(p[1] - target))
    if not abs(best[1] - target) <= tol:
        raise DomainExhaustedError(
            f"level {target} is jumped over near rho={lo:.6g}: "
            f"values {f_lo!r} -> {f_hi!r}"
        )
    return best


def _bracket_from(level, target, alg, start):
    """Grow an upper bracket end from a rho known to sit below the level."""
    ceiling = _rho_ceiling(alg)
    lo = start
    hi = min(2.0 * start, ceiling)
    while level(hi) < target:
        if hi >= ceiling:
            raise DomainExhaustedError(
                f"{AlgorithmId(alg).value}: level {target} not reached on (0, {ceiling:g}]"
            )
        lo, hi = hi, min(2.0 * hi, ceiling)
    return lo, hi


def _level_root(level, alg, delta, target, tol, start=None):
    ceiling = _rho_ceiling(alg)
    if start is not None and level(start) < target:
        lo, hi = _bracket_from(level, target, alg, start)
    else:
        lo, hi = RHO_FLOOR, ceiling
        if not level(lo) < target:
            raise DomainExhaustedError(
                f"{AlgorithmId(alg).value}: level at rho={lo:g} already exceeds "
                f"target {target} (delta={delta})"
            )
        if level(hi) < target:
            raise DomainExhaustedError(
                f"{AlgorithmId(alg).value}: level {target} not reached on "
                f"(0, {ceiling:g}] at delta={delta}"
            )
    return _solve_level(level, target, lo, hi, tol)


def rho_star(alg, delta: float, target: float = 1.0, tol: float = LEVEL_TOL,
             start: float | None = None, **bounds_kwargs) -> float:
    """Solve mu^alg(delta, rho) = target for rho.

    ``start`` is an optional rho known (or suspected) to lie below the
    solution, used to shorten the bracket.
    """
    if not target > 0:
        raise DomainError(f"target must be positive, got {target!r}")
    rho, _ = _level_root(lambda r: mu_level(alg, delta, r, **bounds_kwargs),
                         alg, delta, target, tol, start)
    return rho


@dataclass
class TransitionPoint:
    delta: float
    rho_star: float | None
    level: float | None
    residual: float | None
    lambda_residual: float
    error: str | None = None

    @property
    def oversampling(self) -> float | None:
        return None if self.rho_star is None else 1.0 / self.rho_star


@dataclass
class TransitionTable:
    algorithm: AlgorithmId
    kind: str  # "mu-level" or "stability-level"
    target: float
    points: list[TransitionPoint] = field(default_factory=list)

    CSV_HEADER = ("delta", "rho_star", "oversampling", "residual")

    @property
    def deltas(self):
        return np.array([p.delta for p in self.points])

    @property
    def rhos(self):
        return np.array([np.nan if p.rho_star is None else p.rho_star for p in self.points])

    def rows(self):
        for p in self.points:
            yield (p.delta, p.rho_star, p.oversampling, p.residual)

    def to_dict(self):
        return {
            "algorithm": self.algorithm.value,
            "kind": self.kind,
            "target": self.target,
            "points": [dict(asdict(p), oversampling=p.oversampling) for p in self.points],
        }


def _curve(alg, deltas, target, kind, level_of, tol):
    alg = AlgorithmId(alg)
    if alg not in CURVE_ALGORITHMS:
        raise ValueError(f"no transition curve for {alg.value}")
    deltas = [float(d) for d in deltas]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta grid must be strictly increasing")
    table = TransitionTable(alg, kind, float(target))
    previous = None
    for delta in deltas:
        with record_roots() as log:
            try:
                if not 0.0 < delta <= 1.0:
                    raise DomainError(f"delta must lie in (0, 1], got {delta}")
                level = lambda r, d=delta: level_of(alg, d, r)  # noqa: E731
                rho, value = _level_root(level, alg, delta, target, tol, start=previous)
            except SparsePhaseError as exc:
                table.points.append(
                    TransitionPoint(delta, None, None, None, log.max_residual, str(exc))
                )
                continue
        previous = rho
        table.points.append(
            TransitionPoint(delta, rho, value, abs(value - target), log.max_residual)
        )
    return table


def transition_curve(alg, deltas=None, target: float = 1.0,
                     tol: float = LEVEL_TOL) -> TransitionTable:
    """rho_star over a sorted delta grid, warm-starting each point from the last.

    Failures at individual points are recorded in the table, not raised.
    """
    if deltas is None:
        deltas = default_delta_grid()
    return _curve(alg, deltas, target, "mu-level", mu_level, tol)


def stability_level_curve(alg, deltas=None, level: float = 10.0,
                          tol: float = LEVEL_TOL) -> TransitionTable:
    """Per delta, the rho where xi/(1 - mu) equals ``level``."""
    if deltas is None:
        deltas = default_delta_grid()
    return _curve(alg, deltas, level, "stability-level", stability_level, tol)
