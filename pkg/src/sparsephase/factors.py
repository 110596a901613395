"""Convergence and stability factors of CoSaMP, SP, IHT, l1 and ROMP.

Each algorithm's guarantee reads

    ||x - x_hat^l|| <= kappa * mu**l * ||x|| + xi / (1 - mu) * ||e||

with mu, xi, kappa rational expressions in the aRIP constants at a few
multiples of the sparsity. The expressions are the same whether the
constants belong to a concrete matrix (orders a*k) or are the asymptotic
Gaussian bounds (arguments (delta, a*rho)), so the formulas below take a
:class:`BoundsProvider` and never look at where the numbers came from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .errors import DomainError, UndefinedRatioError
from .rip_asymptotic import PhasePoint, bound_L, bound_U

__all__ = [
    "AlgorithmId",
    "FactorSet",
    "BoundsProvider",
    "AsymptoticBoundsProvider",
    "FiniteBoundsProvider",
    "FixedBoundsProvider",
    "cosamp_factors",
    "sp_factors",
    "iht_factors",
    "l1_factors",
    "romp_factor",
    "romp_threshold",
    "factors_for",
    "stability_ratio",
    "nu_min",
    "max_iterations",
]

SQRT2 = math.sqrt(2.0)


class AlgorithmId(str, Enum):
    COSAMP = "cosamp"
    SP = "sp"
    IHT = "iht"
    L1 = "l1"
    ROMP = "romp"


# multiples of k (or rho) each factor formula consumes
MULTIPLES = {
    AlgorithmId.COSAMP: (2, 3, 4),
    AlgorithmId.SP: (1, 2, 3),
    AlgorithmId.IHT: (2, 3),
    AlgorithmId.L1: (2,),
    AlgorithmId.ROMP: (2,),
}


@dataclass(frozen=True)
class FactorSet:
    """Factors of one algorithm at one problem point.

    ``kappa`` is None for l1, which has no iterative form. ``omega_star`` is
    set for IHT only.
    """

    algorithm: AlgorithmId
    mu: float
    xi: float
    kappa: float | None
    omega_star: float | None = None
    at: object = None

    @property
    def stability(self) -> float | None:
        return self.xi / (1.0 - self.mu) if self.mu < 1.0 else None


# ---------------------------------------------------------------------------
# bounds providers


class BoundsProvider:
    """Supplies (L_a, U_a) for integer multiples a of the sparsity."""

    at = None

    def bounds(self, multiple: int) -> tuple[float, float]:
        raise NotImplementedError

    def require(self, *multiples: int) -> dict[int, tuple[float, float]]:
        out = {}
        for a in multiples:
            L, U = self.bounds(a)
            if not L < 1.0:
                raise DomainError(
                    f"L at multiple {a} is {L!r} >= 1; factors undefined at {self.at}"
                )
            out[a] = (L, U)
        return out


class AsymptoticBoundsProvider(BoundsProvider):
    """Gaussian bounds L(delta, a*rho), U(delta, a*rho).

    ``inflation`` evaluates everything at (1 + inflation) * rho, the epsilon
    device of the probabilistic statements; it defaults to zero.
    """

    def __init__(self, delta: float, rho: float, inflation: float = 0.0, **u_kwargs):
        self.at = PhasePoint(delta, rho)
        self.inflation = inflation
        self._u_kwargs = u_kwargs
        self._cache: dict[int, tuple[float, float]] = {}

    def bounds(self, multiple):
        if multiple not in self._cache:
            rho = multiple * (1.0 + self.inflation) * self.at.rho
            if not rho * self.at.delta <= 1.0:
                raise DomainError(
                    f"{multiple}*rho*delta = {rho * self.at.delta:g} exceeds 1"
                )
            point = PhasePoint(self.at.delta, rho)
            self._cache[multiple] = (bound_L(point), bound_U(point, **self._u_kwargs))
        return self._cache[multiple]


class FiniteBoundsProvider(BoundsProvider):
    """aRIP constants of a concrete matrix at orders a*k.

    ``method`` is ``"exact"`` (subset enumeration) or ``"estimate"``
    (randomised lower estimate; the resulting factors are then optimistic).
    """

    def __init__(self, A, k: int, method: str = "exact", trials: int = 1000, seed=0):
        from .rip_finite import ProblemSize

        A = np.asarray(A, dtype=float)
        n, N = A.shape
        self.A = A
        self.k = k
        self.at = ProblemSize(k, n, N)
        self.method = method
        self.trials = trials
        self.seed = seed
        self._cache: dict[int, tuple[float, float]] = {}

    def bounds(self, multiple):
        from .rip_finite import estimate_arip_lower, exact_arip

        if multiple not in self._cache:
            order = multiple * self.k
            n, N = self.A.shape
            if order > min(n, N):
                # a rank-deficient order: some vector is mapped to zero
                self._cache[multiple] = (1.0, float("inf"))
            elif self.method == "exact":
                b = exact_arip(self.A, order)
                self._cache[multiple] = (b.L, b.U)
            elif self.method == "estimate":
                b = estimate_arip_lower(self.A, order, self.trials, self.seed)
                self._cache[multiple] = (b.L, b.U)
            else:
                raise ValueError(f"unknown method {self.method!r}")
        return self._cache[multiple]


class FixedBoundsProvider(BoundsProvider):
    """Caller-supplied constants, either per multiple or one pair for all."""

    def __init__(self, table: Mapping[int, tuple[float, float]] | None = None,
                 uniform: tuple[float, float] | None = None):
        if table is None and uniform is None:
            raise ValueError("supply a table or a uniform (L, U) pair")
        self.table = dict(table or {})
        self.uniform = uniform

    def bounds(self, multiple):
        if multiple in self.table:
            return self.table[multiple]
        if self.uniform is not None:
            return self.uniform
        raise DomainError(f"no bounds supplied for multiple {multiple}")


# ---------------------------------------------------------------------------
# factor formulas


def cosamp_factors(b: BoundsProvider) -> FactorSet:
    z = b.require(2, 3, 4)
    (L2, U2), (L3, _), (L4, U4) = z[2], z[3], z[4]
    lead = 2.0 + (L4 + U4) / (1.0 - L3)
    mu = 0.5 * lead * (L2 + U2 + L4 + U4) / (1.0 - L2)
    xi = 2.0 * (lead * math.sqrt(1.0 + U2) / (1.0 - L2) + 1.0 / math.sqrt(1.0 - L3))
    return FactorSet(AlgorithmId.COSAMP, mu, xi, 1.0, at=b.at)


def sp_factors(b: BoundsProvider) -> FactorSet:
    z = b.require(1, 2, 3)
    (L1, U1), (L2, U2), (_, U3) = z[1], z[2], z[3]
    kappa = 1.0 + U2 / (1.0 - L1)
    inner = 1.0 + 2.0 * U3 / (1.0 - L2)
    mu = 2.0 * U3 / (1.0 - L1) * inner * kappa
    xi = (math.sqrt(1.0 + U1) / (1.0 - L1) * (1.0 - mu + 2.0 * kappa * inner)
          + 2.0 * kappa / math.sqrt(1.0 - L2))
    return FactorSet(AlgorithmId.SP, mu, xi, kappa, at=b.at)


def iht_factors(b: BoundsProvider, omega: float | None = None) -> FactorSet:
    """IHT factors for step size ``omega``.

    With ``omega=None`` the step ``2 / (2 + U_3 - L_3)`` is used, which
    balances the two arguments of the contraction maximum. That step can
    exceed 1 when L_3 is large, so any omega in (0, 2) is accepted.
    """
    z = b.require(2, 3)
    (_, U2), (L3, U3) = z[2], z[3]
    omega_star = 2.0 / (2.0 + U3 - L3)
    w = omega_star if omega is None else omega
    if not 0.0 < w < 2.0:
        raise DomainError(f"omega must lie in (0, 2), got {w!r}")
    if omega is None:
        mu = 2.0 * SQRT2 * (L3 + U3) / (2.0 + U3 - L3)
        xi = 4.0 * math.sqrt(1.0 + U2) / (2.0 + U3 - L3)
    else:
        mu = 2.0 * SQRT2 * max(w * (1.0 + U3) - 1.0, 1.0 - w * (1.0 - L3))
        xi = 2.0 * w * math.sqrt(1.0 + U2)
    return FactorSet(AlgorithmId.IHT, mu, xi, 1.0, omega_star=omega_star, at=b.at)


def l1_factors(b: BoundsProvider) -> FactorSet:
    L2, U2 = b.require(2)[2]
    mu = (1.0 + SQRT2) / 4.0 * ((1.0 + U2) / (1.0 - L2) - 1.0)
    xi = 3.0 * (1.0 + SQRT2) / (1.0 - L2)
    return FactorSet(AlgorithmId.L1, mu, xi, None, at=b.at)


def romp_threshold(n: int) -> float:
    """Size-dependent bound that ROMP's factor must stay under."""
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    return 1.0 / (1.0 + math.sqrt(5.0 * n / (n - 1.0) * (math.log(n) + 2.0)))


def romp_factor(b: BoundsProvider, n: int) -> tuple[float, float, bool]:
    """Return ``(mu_r, threshold, mu_r < threshold)`` for ROMP."""
    L2, U2 = b.require(2)[2]
    mu_r = U2 * (1.0 + (1.0 + U2) / (1.0 - L2))
    threshold = romp_threshold(n)
    return mu_r, threshold, mu_r < threshold


_FORMULAS = {
    AlgorithmId.COSAMP: cosamp_factors,
    AlgorithmId.SP: sp_factors,
    AlgorithmId.IHT: iht_factors,
    AlgorithmId.L1: l1_factors,
}


def factors_for(alg, b: BoundsProvider) -> FactorSet:
    alg = AlgorithmId(alg)
    if alg is AlgorithmId.ROMP:
        raise ValueError("ROMP has no FactorSet; use romp_factor")
    return _FORMULAS[alg](b)


def stability_ratio(f: FactorSet) -> float:
    if not f.mu < 1.0:
        raise UndefinedRatioError(f"stability ratio undefined for mu={f.mu!r} >= 1")
    return f.xi / (1.0 - f.mu)


def nu_min(x) -> float:
    """Smallest nonzero magnitude of ``x`` relative to its Euclidean norm."""
    x = np.asarray(x, dtype=float).ravel()
    nz = np.abs(x[x != 0])
    if nz.size == 0:
        raise DomainError("nu_min is undefined for the zero vector")
    return float(nz.min() / np.linalg.norm(x))


def max_iterations(f: FactorSet, nu: float) -> int:
    """Iteration count after which the support must have been found.

    Returns 1 for mu = 0: a perfect isometry recovers in one step.
    """
    kappa = 1.0 if f.kappa is None else f.kappa
    if not 0.0 <= f.mu < 1.0:
        raise DomainError(f"iteration cap needs 0 <= mu < 1, got {f.mu!r}")
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"nu must lie in (0, 1], got {nu!r}")
    if f.mu == 0.0:
        return 1
    q = (math.log(nu) - math.log(kappa)) / math.log(f.mu)
    # shave rounding noise so exact integers do not ceil upward
    return max(1, math.ceil(q - 1e-9 * max(1.0, abs(q))) + 1)
