"""Asymmetric RIP constants of concrete matrices.

``exact_arip`` enumerates every column subset of the requested order;
``estimate_arip_lower`` samples subsets and climbs by single-column swaps,
which only ever yields lower bounds on the true constants.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CombinatorialBlowupError, DimensionError, DomainError

__all__ = [
    "ProblemSize",
    "Provenance",
    "FiniteAripBounds",
    "submatrix_extreme_singvals",
    "exact_arip",
    "estimate_arip_lower",
    "verify_arip_implications",
    "ImplicationReport",
    "MAX_SUBSETS",
]

MAX_SUBSETS = 10**7
_CHUNK = 20000


@dataclass(frozen=True)
class ProblemSize:
    k: int
    n: int
    N: int

    def __post_init__(self):
        if not (1 <= self.k < self.n <= self.N):
            raise DomainError(f"need 1 <= k < n <= N, got (k, n, N) = "
                              f"({self.k}, {self.n}, {self.N})")


class Provenance(str, Enum):
    EXACT = "exact"
    MONTE_CARLO_LOWER = "monte-carlo-lower"


@dataclass(frozen=True)
class FiniteAripBounds:
    L: float
    U: float
    order: int
    provenance: Provenance


def _gram_extremes(A, subsets):
    """Extreme Gram eigenvalues for a batch of equal-size subsets."""
    sub = A[:, subsets]  # n x m x order
    sub = np.moveaxis(sub, 0, 1)  # m x n x order
    order = subsets.shape[1]
    n = A.shape[0]
    if order > n / 2:
        s = np.linalg.svd(sub, compute_uv=False)
        lo, hi = s[:, -1] ** 2, s[:, 0] ** 2
        if order > n:
            lo = np.zeros_like(lo)
        return lo, hi
    gram = np.einsum("mij,mik->mjk", sub, sub)
    ev = np.linalg.eigvalsh(gram)
    return ev[:, 0], ev[:, -1]


def submatrix_extreme_singvals(A, I) -> tuple[float, float]:
    """Smallest and largest singular values of the column submatrix ``A[:, I]``."""
    A = np.asarray(A, dtype=float)
    I = np.atleast_1d(np.asarray(I, dtype=int))
    if I.size > A.shape[0]:
        raise DimensionError(f"|I|={I.size} exceeds the row count {A.shape[0]}")
    if I.size == 0:
        raise DimensionError("empty index set")
    lo, hi = _gram_extremes(A, I[None, :])
    return math.sqrt(max(lo[0], 0.0)), math.sqrt(max(hi[0], 0.0))


def _check_order(A, order):
    if A.ndim != 2:
        raise DimensionError("A must be a matrix")
    if not 1 <= order <= A.shape[1]:
        raise DimensionError(f"order {order} outside 1..{A.shape[1]}")


def exact_arip(A, order: int, max_subsets: int = MAX_SUBSETS) -> FiniteAripBounds:
    """aRIP constants of ``A`` at ``order`` by exhaustive enumeration.

    L is the largest ``1 - smin^2`` and U the largest ``smax^2 - 1`` over all
    column subsets of size ``order``, each clamped at zero.
    """
    A = np.asarray(A, dtype=float)
    _check_order(A, order)
    N = A.shape[1]
    total = math.comb(N, order)
    if total > max_subsets:
        raise CombinatorialBlowupError(
            f"C({N}, {order}) = {total} subsets exceeds the guard {max_subsets}; "
            "use estimate_arip_lower"
        )
    lo_min, hi_max = math.inf, -math.inf
    combos = itertools.combinations(range(N), order)
    while True:
        chunk = np.array(list(itertools.islice(combos, _CHUNK)), dtype=int)
        if chunk.size == 0:
            break
        lo, hi = _gram_extremes(A, chunk)
        lo_min = min(lo_min, float(lo.min()))
        hi_max = max(hi_max, float(hi.max()))
    return FiniteAripBounds(
        L=max(0.0, 1.0 - lo_min),
        U=max(0.0, hi_max - 1.0),
        order=order,
        provenance=Provenance.EXACT,
    )


def _ascend(A, subset, score, max_sweeps):
    """Single-column swap hill climb maximising ``score(subset)``."""
    N = A.shape[1]
    current = list(subset)
    best = score(np.array(current))
    for _ in range(max_sweeps):
        improved = False
        for pos in range(len(current)):
            outside = np.setdiff1d(np.arange(N), current)
            if outside.size == 0:
                break
            cands = np.repeat(np.array(current)[None, :], outside.size, axis=0)
            cands[:, pos] = outside
            vals = score(cands)
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = float(vals[j])
                current[pos] = int(outside[j])
                improved = True
        if not improved:
            break
    return best


def estimate_arip_lower(A, order: int, trials: int = 1000, seed=0,
                        max_sweeps: int = 50, polish: int = 4) -> FiniteAripBounds:
    """Randomised lower estimates of the aRIP constants.

    ``trials`` random subsets are scored; the ``polish`` best candidates for
    L and (separately) for U are then improved by single-column swaps until no
    swap helps or ``max_sweeps`` passes are done. Deterministic given ``seed``.
    """
    A = np.asarray(A, dtype=float)
    _check_order(A, order)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    N = A.shape[1]
    subsets = np.array([rng.choice(N, size=order, replace=False) for _ in range(trials)])
    subsets.sort(axis=1)
    lo, hi = _gram_extremes(A, subsets)

    def score_L(s):
        s = np.atleast_2d(s)
        return 1.0 - _gram_extremes(A, s)[0]

    def score_U(s):
        s = np.atleast_2d(s)
        return _gram_extremes(A, s)[1] - 1.0

    best_L = float((1.0 - lo).max())
    best_U = float((hi - 1.0).max())
    for i in np.argsort(lo)[:polish]:
        best_L = max(best_L, _ascend(A, subsets[i], lambda s: score_L(s), max_sweeps))
    for i in np.argsort(-hi)[:polish]:
        best_U = max(best_U, _ascend(A, subsets[i], lambda s: score_U(s), max_sweeps))
    return FiniteAripBounds(
        L=max(0.0, best_L),
        U=max(0.0, best_U),
        order=order,
        provenance=Provenance.MONTE_CARLO_LOWER,
    )


# ---------------------------------------------------------------------------
# implications of the aRIP


@dataclass
class ImplicationReport:
    """Per-inequality outcome of randomised aRIP implication checks.

    ``worst_slack`` is min(rhs - lhs) over all draws (relative to the rhs
    scale); ``violations`` counts draws with lhs > rhs beyond round-off.
    """

    draws: int
    violations: dict
    worst_slack: dict

    @property
    def passed(self) -> dict:
        return {key: self.violations[key] == 0 for key in self.violations}

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())


_IMPLICATIONS = ("i", "ii_lower", "ii_upper", "iii", "iv", "v", "vi")


def verify_arip_implications(A, k: int, draws: int = 1000, seed=0, rtol: float = 1e-10,
                             constants: dict | None = None) -> ImplicationReport:
    """Check the standard consequences of the aRIP on random draws.

    For random disjoint index sets I, J with |I| + |J| <= k, random vectors
    u, v, y and a step omega in (0, 1):

    (i)   ||A_I^T y|| <= sqrt(1 + U_|I|) ||y||
    (ii)  (1 - L_|I|) ||u|| <= ||A_I^T A_I u|| <= (1 + U_|I|) ||u||
    (iii) ||pinv(A_I) y|| <= ||y|| / sqrt(1 - L_|I|)
    (iv)  |<A_I u, A_J v>| <= (L_m + U_m) / 2 ||u|| ||v||,  m = |I| + |J|
    (v)   ||A_I^T A_J v|| <= U_m ||v||
    (vi)  ||(Id - omega A_I^T A_I) u|| <= max(omega (1 + U) - 1, 1 - omega (1 - L)) ||u||

    Exact constants for orders 1..k are enumerated unless ``constants``
    (order -> (L, U)) is supplied.
    """
    A = np.asarray(A, dtype=float)
    n, N = A.shape
    if not 2 <= k <= min(n, N):
        raise DimensionError(f"k must lie in 2..{min(n, N)}, got {k}")
    if constants is None:
        constants = {}
        for m in range(1, k + 1):
            b = exact_arip(A, m)
            constants[m] = (b.L, b.U)
    rng = np.random.default_rng(seed)
    violations = {key: 0 for key in _IMPLICATIONS}
    worst = {key: math.inf for key in _IMPLICATIONS}

    def record(key, lhs, rhs):
        slack = rhs - lhs
        scale = max(abs(rhs), abs(lhs), 1.0)
        if slack < -rtol * scale:
            violations[key] += 1
        worst[key] = min(worst[key], slack / scale)

    for _ in range(draws):
        m = int(rng.integers(2, k + 1))
        size_i = int(rng.integers(1, m))
        perm = rng.permutation(N)
        I, J = perm[:size_i], perm[size_i:m]
        AI, AJ = A[:, I], A[:, J]
        u = rng.standard_normal(I.size)
        v = rng.standard_normal(J.size)
        y = rng.standard_normal(n)
        omega = float(rng.uniform(0.0, 1.0))
        L_i, U_i = constants[I.size]
        L_m, U_m = constants[m]
        nu, nv, ny = np.linalg.norm(u), np.linalg.norm(v), np.linalg.norm(y)

        record("i", np.linalg.norm(AI.T @ y), math.sqrt(1.0 + U_i) * ny)
        gu = AI.T @ (AI @ u)
        record("ii_lower", (1.0 - L_i) * nu, np.linalg.norm(gu))
        record("ii_upper", np.linalg.norm(gu), (1.0 + U_i) * nu)
        if L_i < 1.0:
            z = np.linalg.lstsq(AI, y, rcond=None)[0]
            record("iii", np.linalg.norm(z), ny / math.sqrt(1.0 - L_i))
        record("iv", abs(float((AI @ u) @ (AJ @ v))), 0.5 * (L_m + U_m) * nu * nv)
        record("v", np.linalg.norm(AI.T @ (AJ @ v)), U_m * nv)
        contraction = max(omega * (1.0 + U_i) - 1.0, 1.0 - omega * (1.0 - L_i))
        record("vi", np.linalg.norm(u - omega * gu), contraction * nu)
    return ImplicationReport(draws=draws, violations=violations, worst_slack=worst)
