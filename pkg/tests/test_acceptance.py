"""One test per acceptance criterion; each prints a PASS/FAIL line."""
import itertools
import math
import time
import warnings

import mpmath as mp
import numpy as np
import pytest

from sparsephase.errors import DomainError
from sparsephase.experiment import TrialSpec, draw_problem, gaussian_matrix
from sparsephase.factors import (
    AsymptoticBoundsProvider,
    FixedBoundsProvider,
    factors_for,
    romp_threshold,
)
from sparsephase.rip_asymptotic import PhasePoint, bound_L, bound_U, record_roots
from sparsephase.rip_finite import ProblemSize, exact_arip, verify_arip_implications
from sparsephase.solvers import RecoveryOptions, solve
from sparsephase.transition import default_delta_grid, rho_star, transition_curve

REFERENCE = {"l1": 317, "iht": 907, "sp": 3124, "cosamp": 4923}
ORDER = ("cosamp", "sp", "iht", "l1")


@pytest.fixture(scope="module")
def endpoint_constants():
    start = time.perf_counter()
    with record_roots() as log:
        values = {alg: 1.0 / rho_star(alg, 1.0) for alg in REFERENCE}
    return values, time.perf_counter() - start, log


@pytest.fixture(scope="module")
def curves():
    start = time.perf_counter()
    with record_roots() as log:
        tables = {alg: transition_curve(alg, default_delta_grid(50, 1e-3, 1.0)) for alg in ORDER}
    return tables, time.perf_counter() - start, log


def test_criterion_1_oversampling_constants(criterion, endpoint_constants):
    values, elapsed, _ = endpoint_constants
    errs = {alg: abs(values[alg] / REFERENCE[alg] - 1.0) for alg in REFERENCE}
    detail = ", ".join(f"{a}={values[a]:.2f} vs {REFERENCE[a]}" for a in REFERENCE)
    criterion("1 oversampling constants within 1%",
              all(e <= 0.01 for e in errs.values()) and elapsed < 60,
              f"{detail}; {elapsed:.1f}s")


def test_criterion_2_curve_ordering(criterion, curves):
    tables, elapsed, _ = curves
    rhos = np.array([tables[a].rhos for a in ORDER])
    complete = not np.isnan(rhos).any()
    ordered = complete and bool(np.all(np.diff(rhos, axis=0) > 0))
    criterion("2 csp < sp < iht < l1 at all 50 deltas", ordered and elapsed < 300,
              f"{elapsed:.1f}s")


def test_criterion_3_root_residuals(criterion, endpoint_constants, curves):
    worst = max(endpoint_constants[2].max_residual, curves[2].max_residual)
    count = endpoint_constants[2].count + curves[2].count
    criterion("3 lambda root residuals <= 1e-8", worst <= 1e-8 and count > 0,
              f"{count} roots, max residual {worst:.2e}")


def test_criterion_4_trivial_isometry(criterion):
    b = FixedBoundsProvider(uniform=(0.0, 0.0))
    expected = {"cosamp": (0, 6, 1), "sp": (0, 5, 1), "iht": (0, 2, 1),
                "l1": (0, 3 * (1 + math.sqrt(2)), None)}
    ok = True
    for alg, (mu, xi, kappa) in expected.items():
        f = factors_for(alg, b)
        ok &= abs(f.mu - mu) <= 1e-12 and abs(f.xi - xi) <= 1e-12
        ok &= (f.kappa is None) if kappa is None else abs(f.kappa - kappa) <= 1e-12
    criterion("4 zero-deviation factor values", ok)


def test_criterion_5_exact_arip_and_implications(criterion):
    start = time.perf_counter()
    worst_gap, violations = 0.0, 0
    for seed in range(10):
        A = gaussian_matrix(6, 10, seed)
        constants = {}
        for order in range(1, 5):
            b = exact_arip(A, order)
            lo, hi = np.inf, -np.inf
            for I in itertools.combinations(range(10), order):
                ev = np.linalg.eigvalsh(A[:, I].T @ A[:, I])
                lo, hi = min(lo, ev[0]), max(hi, ev[-1])
            worst_gap = max(worst_gap, abs(b.L - max(0.0, 1 - lo)), abs(b.U - max(0.0, hi - 1)))
            constants[order] = (b.L, b.U)
        rep = verify_arip_implications(A, 4, draws=1000, seed=seed, constants=constants)
        violations += sum(rep.violations.values())
    elapsed = time.perf_counter() - start
    criterion("5 exact aRIP matches Gram oracle, zero implication violations",
              worst_gap <= 1e-10 and violations == 0 and elapsed < 120,
              f"max gap {worst_gap:.1e}, {violations} violations, {elapsed:.1f}s")


def _l0(A, y, k):
    best, best_res = None, np.inf
    for I in itertools.combinations(range(A.shape[1]), k):
        z = np.linalg.lstsq(A[:, I], y, rcond=None)[0]
        res = np.linalg.norm(y - A[:, I] @ z)
        if res < best_res:
            best_res, best = res, (list(I), z)
    x = np.zeros(A.shape[1])
    x[best[0]] = best[1]
    return x


def test_criterion_6_l0_oracle_equivalence(criterion):
    hits = {"cosamp": 0, "sp": 0, "iht": 0}
    opts = RecoveryOptions(omega=0.65, debias=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for seed in range(100):
            A, _, _, y = draw_problem(TrialSpec(ProblemSize(2, 8, 16), signal_kind="gaussian",
                                                seed=seed))
            x0 = _l0(A, y, 2)
            for alg in hits:
                est = solve(alg, A, y, 2, opts).estimate
                hits[alg] += bool(np.linalg.norm(est - x0) <= 1e-6 * np.linalg.norm(x0))
    ok = hits["cosamp"] >= 95 and hits["sp"] >= 95 and hits["iht"] >= 90
    criterion("6 l0-oracle agreement at k=2, n=8, N=16", ok,
              f"cosamp {hits['cosamp']}/100 (need 95), sp {hits['sp']}/100 (need 95), "
              f"iht {hits['iht']}/100 (need 90)")


def test_criterion_7_comfortable_recovery(criterion):
    start = time.perf_counter()
    hits = {"cosamp": 0, "sp": 0, "iht": 0}
    for seed in range(100):
        A, x, _, y = draw_problem(TrialSpec(ProblemSize(5, 100, 200), seed=seed))
        for alg in hits:
            est = solve(alg, A, y, 5).estimate
            hits[alg] += bool(np.linalg.norm(est - x) <= 1e-6 * np.linalg.norm(x))
    elapsed = time.perf_counter() - start
    criterion("7 success >= 0.95 at k=5, n=100, N=200",
              min(hits.values()) >= 95 and elapsed < 60,
              f"{hits}, {elapsed:.1f}s")


def test_criterion_8_monotonicity(criterion):
    deltas = np.linspace(0.05, 1.0, 20)
    rhos = np.geomspace(1e-3, 0.45, 20)
    bad = []
    for d in deltas:
        L, U = [], []
        mu = {alg: [] for alg in ORDER}
        for r in rhos:
            at = PhasePoint(float(d), float(r))
            try:
                L.append(bound_L(at))
            except DomainError:
                L.append(np.nan)
            U.append(bound_U(at))
            b = AsymptoticBoundsProvider(float(d), float(r))
            for alg in ORDER:
                try:
                    mu[alg].append(factors_for(alg, b).mu)
                except DomainError:
                    mu[alg].append(np.nan)
        L, U = np.array(L), np.array(U)
        defined = ~np.isnan(L)
        if np.any(np.diff(L[defined]) <= 0):
            bad.append(f"L at delta={d:.3f}")
        if np.any(np.diff(U) < 0):
            bad.append(f"U at delta={d:.3f}")
        for alg, vals in mu.items():
            vals = np.array(vals)
            vals = vals[~np.isnan(vals)]
            if np.any(np.diff(vals) <= 0):
                bad.append(f"mu^{alg} at delta={d:.3f}")
    criterion("8 L, U and mu monotone in rho on a 20x20 grid", not bad, "; ".join(bad[:5]))


def test_criterion_9_romp_threshold(criterion):
    thr = [romp_threshold(n) for n in (10**2, 10**4, 10**6)]
    n = mp.mpf(100)
    ref = float(1 / (1 + mp.sqrt(5 * n / (n - 1) * (mp.log(n) + 2))))
    ok = thr[0] > thr[1] > thr[2] and abs(thr[0] - ref) <= 1e-12 and abs(thr[0] - 0.14758) < 5e-6
    criterion("9 ROMP threshold decreasing, 0.14758 at n=100", ok,
              ", ".join(f"{t:.6f}" for t in thr))
