"""Seeded Gaussian recovery trials and empirical success-rate grids.

Every random draw is keyed by a tuple of integers and fed through
``SeedSequence -> Philox``, a counter-based generator, so a trial depends
only on its key and never on execution order. Success grids are
average-case measurements; they say nothing about the worst-case curves.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, SparsePhaseError
from .rip_finite import ProblemSize
from .solvers import RecoveryOptions, RecoveryResult, solve

__all__ = [
    "rng_for",
    "gaussian_matrix",
    "sparse_signal",
    "TrialSpec",
    "TrialOutcome",
    "run_trial",
    "draw_problem",
    "Cell",
    "SuccessGrid",
    "success_grid",
    "cell_size",
    "EXACT_TOLERANCE",
]

EXACT_TOLERANCE = 1e-6
THREADS_ENV = "SPARSEPHASE_THREADS"


def rng_for(*key) -> np.random.Generator:
    """Independent generator for an integer key, e.g. (seed, cell, trial)."""
    if len(key) == 1 and isinstance(key[0], np.random.SeedSequence):
        seq = key[0]
    else:
        seq = np.random.SeedSequence([int(k) for k in key])
    return np.random.Generator(np.random.Philox(seq))


def gaussian_matrix(n: int, N: int, seed) -> np.ndarray:
    """n x N matrix with i.i.d. N(0, 1/n) entries."""
    if n < 1 or N < 1:
        raise DomainError(f"matrix dimensions must be positive, got {n}x{N}")
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    return rng.standard_normal((n, N)) / np.sqrt(n)


def sparse_signal(N: int, k: int, kind: str = "sign", seed=0) -> np.ndarray:
    """Length-N vector with exactly k nonzeros on a uniformly random support."""
    if not 0 <= k <= N:
        raise DomainError(f"need 0 <= k <= N, got k={k}, N={N}")
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    support = rng.choice(N, size=k, replace=False)
    x = np.zeros(N)
    if kind == "sign":
        x[support] = rng.choice([-1.0, 1.0], size=k)
    elif kind == "gaussian":
        vals = rng.standard_normal(k)
        vals[vals == 0.0] = 1.0
        x[support] = vals
    else:
        raise ValueError(f"unknown signal kind {kind!r}")
    return x


@dataclass(frozen=True)
class TrialSpec:
    """Everything that determines one recovery trial.

    ``noise_level`` is ``||e|| / ||Ax||``. A trial succeeds when the relative
    error is at most ``tolerance``.
    """

    size: ProblemSize
    algorithm: str = "cosamp"
    signal_kind: str = "sign"
    noise_level: float = 0.0
    seed: int = 0
    options: RecoveryOptions = field(default_factory=RecoveryOptions)
    tolerance: float = EXACT_TOLERANCE

    def __post_init__(self):
        if self.noise_level < 0:
            raise DomainError("noise_level must be nonnegative")
        if self.algorithm not in ("cosamp", "sp", "iht"):
            raise DomainError(f"no solver for {self.algorithm!r}")


@dataclass
class TrialOutcome:
    success: bool
    rel_error: float
    result: RecoveryResult | None
    error: str | None = None


def draw_problem(spec: TrialSpec):
    """Return (A, x, e, y) for a trial; pure function of the spec."""
    k, n, N = spec.size.k, spec.size.n, spec.size.N
    seq = np.random.SeedSequence(int(spec.seed))
    s_matrix, s_signal, s_noise = seq.spawn(3)
    A = gaussian_matrix(n, N, rng_for(s_matrix))
    x = sparse_signal(N, k, spec.signal_kind, rng_for(s_signal))
    clean = A @ x
    e = np.zeros(n)
    if spec.noise_level > 0:
        d = rng_for(s_noise).standard_normal(n)
        e = spec.noise_level * np.linalg.norm(clean) * d / np.linalg.norm(d)
    return A, x, e, clean + e


def run_trial(spec: TrialSpec) -> TrialOutcome:
    A, x, _, y = draw_problem(spec)
    try:
        result = solve(spec.algorithm, A, y, spec.size.k, spec.options)
    except (SparsePhaseError, np.linalg.LinAlgError) as exc:
        return TrialOutcome(False, float("inf"), None, f"{type(exc).__name__}: {exc}")
    rel = float(np.linalg.norm(x - result.estimate) / np.linalg.norm(x))
    return TrialOutcome(rel <= spec.tolerance, rel, result)


def cell_size(delta: float, rho: float, n: int) -> ProblemSize | None:
    """k = round(rho n), N = round(n / delta); None if not 1 <= k < n < N."""
    k = int(round(rho * n))
    N = int(round(n / delta))
    if not (1 <= k < n < N):
        return None
    return ProblemSize(k, n, N)


@dataclass
class Cell:
    delta: float
    rho: float
    k: int | None
    n: int
    N: int | None
    trials: int
    successes: int
    skipped: bool = False

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")


@dataclass
class SuccessGrid:
    algorithm: str
    n: int
    trials: int
    base_seed: int
    cells: list[Cell]

    CSV_HEADER = ("delta", "rho", "k", "n", "N", "trials", "successes")

    @property
    def skipped(self) -> list[Cell]:
        return [c for c in self.cells if c.skipped]

    def rows(self):
        for c in self.cells:
            if not c.skipped:
                yield (c.delta, c.rho, c.k, c.n, c.N, c.trials, c.successes)

    def rates(self, deltas, rhos) -> np.ndarray:
        """Success rates shaped (len(deltas), len(rhos)); NaN where skipped."""
        out = np.full((len(deltas), len(rhos)), np.nan)
        for idx, c in enumerate(self.cells):
            if not c.skipped:
                out[idx // len(rhos), idx % len(rhos)] = c.rate
        return out

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "trials": self.trials,
            "base_seed": self.base_seed,
            "cells": [asdict(c) for c in self.cells],
        }


def _default_workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def success_grid(algorithm: str, deltas, rhos, n: int, trials: int, base_seed: int = 0,
                 options: RecoveryOptions | None = None, signal_kind: str = "sign",
                 noise_level: float = 0.0, tolerance: float = EXACT_TOLERANCE,
                 workers: int | None = None) -> SuccessGrid:
    """Empirical success counts on a (delta, rho) grid, row-major in delta.

    Trial t of cell c uses seed key (base_seed, c, t); ``workers`` threads
    (default from ``SPARSEPHASE_THREADS``) do not change the result.
    """
    options = options or RecoveryOptions()
    workers = workers or _default_workers()
    specs = []
    cells = []
    for ci, (delta, rho) in enumerate((d, r) for d in deltas for r in rhos):
        size = cell_size(float(delta), float(rho), n)
        if size is None:
            cells.append(Cell(float(delta), float(rho), None, n, None, 0, 0, skipped=True))
            continue
        cells.append(Cell(float(delta), float(rho), size.k, n, size.N, trials, 0))
        for t in range(trials):
            seed = int(np.random.SeedSequence([base_seed, ci, t]).generate_state(1, np.uint64)[0])
            specs.append((ci, TrialSpec(size, algorithm, signal_kind, noise_level, seed,
                                        options, tolerance)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda item: run_trial(item[1]), specs))
    else:
        outcomes = [run_trial(spec) for _, spec in specs]
    for (ci, _), outcome in zip(specs, outcomes):
        cells[ci].successes += int(outcome.success)
    return SuccessGrid(algorithm, n, trials, base_seed, cells)
