import math

import numpy as np
import pytest

from sparsephase.errors import DomainError
from sparsephase.factors import AsymptoticBoundsProvider, factors_for
from sparsephase.transition import (
    LEVEL_TOL,
    default_delta_grid,
    mu_level,
    rho_star,
    stability_level,
    stability_level_curve,
    transition_curve,
)

ALGS = ("cosamp", "sp", "iht", "l1")


@pytest.mark.parametrize("alg", ALGS)
def test_mu_is_one_at_rho_star(alg):
    r = rho_star(alg, 0.3)
    mu = factors_for(alg, AsymptoticBoundsProvider(0.3, r)).mu
    assert abs(mu - 1.0) <= LEVEL_TOL
    assert mu_level(alg, 0.3, 0.9 * r) < 1 < mu_level(alg, 0.3, 1.1 * r)


def test_mu_level_undefined_is_inf():
    assert mu_level("cosamp", 0.5, 0.24) == math.inf
    assert stability_level("iht", 0.5, 0.2) == math.inf


def test_lower_target_gives_lower_curve():
    deltas = [0.01, 0.2, 1.0]
    half = transition_curve("iht", deltas, target=0.5)
    one = transition_curve("iht", deltas, target=1.0)
    assert np.all(half.rhos < one.rhos)


def test_warm_start_agrees_with_cold_solve():
    deltas = [0.05, 0.1, 0.4]
    table = transition_curve("sp", deltas)
    for p in table.points:
        assert p.rho_star == pytest.approx(rho_star("sp", p.delta), rel=1e-6)
        assert p.residual <= LEVEL_TOL
        assert p.lambda_residual <= 1e-8


def test_refinement_stability():
    for alg, delta in [("cosamp", 0.5), ("l1", 0.02)]:
        base = rho_star(alg, delta)
        fine = rho_star(alg, delta, nu_points=512, nu_tol=1e-10)
        assert abs(fine - base) <= 1e-3 * base


def test_stability_level_curves():
    deltas = [0.05, 0.3, 1.0]
    mu_curve = transition_curve("iht", deltas).rhos
    low = stability_level_curve("iht", deltas, level=10.0)
    high = stability_level_curve("iht", deltas, level=50.0)
    assert np.all(low.rhos < mu_curve)
    assert np.all(low.rhos < high.rhos)
    for p in low.points:
        assert p.residual <= LEVEL_TOL


def test_oversampling_column_is_reciprocal():
    table = transition_curve("l1", [0.5, 1.0])
    for row in table.rows():
        delta, rho, over, res = row
        assert over == 1.0 / rho
    d = table.to_dict()
    assert d["algorithm"] == "l1" and len(d["points"]) == 2


def test_failed_points_are_recorded():
    table = transition_curve("iht", [0.5, 1.5])
    assert table.points[0].error is None
    assert table.points[1].rho_star is None and "delta" in table.points[1].error


def test_grid_validation():
    with pytest.raises(ValueError):
        transition_curve("iht", [0.5, 0.1])
    with pytest.raises(ValueError):
        transition_curve("romp", [0.5])
    with pytest.raises(DomainError):
        rho_star("iht", 0.5, target=0.0)
    g = default_delta_grid()
    assert len(g) == 50 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(1.0)
