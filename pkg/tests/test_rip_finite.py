import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsephase.cli import read_matrix
from sparsephase.errors import CombinatorialBlowupError, DimensionError, DomainError
from sparsephase.experiment import gaussian_matrix
from sparsephase.rip_finite import (
    ProblemSize,
    Provenance,
    estimate_arip_lower,
    exact_arip,
    submatrix_extreme_singvals,
    verify_arip_implications,
)


def gram_oracle(A, order):
    """Loop over every subset with a dense symmetric eigensolve."""
    lo, hi = np.inf, -np.inf
    for I in itertools.combinations(range(A.shape[1]), order):
        ev = np.linalg.eigvalsh(A[:, I].T @ A[:, I])
        lo, hi = min(lo, ev[0]), max(hi, ev[-1])
    return max(0.0, 1 - lo), max(0.0, hi - 1)


def test_problem_size_validation():
    ProblemSize(2, 8, 16)
    for k, n, N in [(0, 8, 16), (8, 8, 16), (2, 17, 16)]:
        with pytest.raises(DomainError):
            ProblemSize(k, n, N)


def test_singvals_simple_cases():
    assert submatrix_extreme_singvals(np.eye(5), [1, 3]) == pytest.approx((1.0, 1.0))
    A = np.eye(5)
    A[:, 2] *= 2
    assert submatrix_extreme_singvals(A, [2]) == pytest.approx((2.0, 2.0))
    with pytest.raises(DimensionError):
        submatrix_extreme_singvals(np.eye(3)[:, :3], [0, 1, 2, 0])


def test_singvals_match_gram_eigs():
    A = gaussian_matrix(6, 10, 11)
    I = [0, 4, 7]
    ev = np.linalg.eigvalsh(A[:, I].T @ A[:, I])
    lo, hi = submatrix_extreme_singvals(A, I)
    assert lo == pytest.approx(np.sqrt(ev[0]), abs=1e-10)
    assert hi == pytest.approx(np.sqrt(ev[-1]), abs=1e-10)


def test_exact_trivial_cases():
    for order in (1, 2, 4):
        b = exact_arip(np.eye(6), order)
        assert (b.L, b.U) == pytest.approx((0.0, 0.0), abs=1e-14)
        assert b.provenance is Provenance.EXACT
    A = np.hstack([np.eye(4), np.eye(4)[:, :1]])
    b = exact_arip(A, 2)
    assert b.L == pytest.approx(1.0, abs=1e-12)
    assert b.U == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_exact_matches_loop_oracle(order):
    A = gaussian_matrix(6, 10, 5)
    b = exact_arip(A, order)
    L, U = gram_oracle(A, order)
    assert b.L == pytest.approx(L, abs=1e-10)
    assert b.U == pytest.approx(U, abs=1e-10)


def test_exact_matches_committed_golden(data_dir):
    A = read_matrix(data_dir / "gauss6x10.txt")
    golden = json.loads((data_dir / "gauss6x10_arip.json").read_text())
    for order, ref in golden.items():
        b = exact_arip(A, int(order))
        assert b.L == pytest.approx(ref["L"], abs=1e-10)
        assert b.U == pytest.approx(ref["U"], abs=1e-10)


def test_order_above_rows_uses_singular_values():
    A = gaussian_matrix(3, 6, 1)
    b = exact_arip(A, 4)
    assert b.L == 1.0
    assert b.U == pytest.approx(gram_oracle(A, 4)[1], abs=1e-10)


def test_blowup_guard():
    with pytest.raises(CombinatorialBlowupError):
        exact_arip(np.eye(40), 10)
    with pytest.raises(DimensionError):
        exact_arip(np.eye(4), 5)


def test_estimate_identity_and_determinism():
    b = estimate_arip_lower(np.eye(7), 3, trials=20, seed=1)
    assert (b.L, b.U) == pytest.approx((0.0, 0.0), abs=1e-14)
    assert b.provenance is Provenance.MONTE_CARLO_LOWER
    A = gaussian_matrix(8, 16, 3)
    assert estimate_arip_lower(A, 3, 50, seed=4) == estimate_arip_lower(A, 3, 50, seed=4)


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 40))
def test_estimate_never_exceeds_exact(seed, order, trials):
    A = gaussian_matrix(5, 9, seed)
    est = estimate_arip_lower(A, order, trials, seed=seed, polish=1)
    ex = exact_arip(A, order)
    assert est.L <= ex.L + 1e-12
    assert est.U <= ex.U + 1e-12


@pytest.mark.slow
def test_estimate_close_to_exact_on_most_instances():
    hits = 0
    for s in range(100):
        A = gaussian_matrix(8, 16, 1000 + s)
        est = estimate_arip_lower(A, 2, trials=2000, seed=s)
        ex = exact_arip(A, 2)
        hits += abs(est.L - ex.L) <= 0.05 * ex.L and abs(est.U - ex.U) <= 0.05 * ex.U
    assert hits >= 95


def test_implications_identity():
    rep = verify_arip_implications(np.eye(6), 3, draws=200, seed=0)
    assert rep.all_passed
    assert all(v >= -1e-12 for v in rep.worst_slack.values())


def test_implication_vi_identity_omega_one():
    I = [0, 2]
    u = np.array([1.5, -2.0])
    A = np.eye(5)
    left = np.linalg.norm(u - 1.0 * A[:, I].T @ (A[:, I] @ u))
    assert left == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_implications_gaussian(seed):
    rep = verify_arip_implications(gaussian_matrix(6, 10, seed), 2, draws=1000, seed=seed)
    assert rep.all_passed, rep.violations


def test_implication_v_fails_when_lower_deviation_dominates():
    # two columns with Gram [[0.5, 0.4], [0.4, 0.5]]: U_2 = 0 but the
    # cross term is 0.4, so (v) cannot hold while (iv) still does
    A = np.linalg.cholesky(np.array([[0.5, 0.4], [0.4, 0.5]])).T
    rep = verify_arip_implications(A, 2, draws=50, seed=0)
    assert rep.violations["v"] == 50
    assert rep.violations["iv"] == 0
    assert exact_arip(A, 2).U == 0.0
