import math

import numpy as np
import pytest

from npdyn.errors import GridError
from npdyn.qmcheck import (
    RadialGrid,
    conformal_potential,
    convergence_order,
    radial_laplacian,
    stationarity_residual,
)


def test_potential_examples():
    assert conformal_potential(4, 0.37) == 0.0
    assert conformal_potential(1, 1.0) == 12.0
    assert conformal_potential(2, 2.0) == 2.0
    np.testing.assert_array_equal(conformal_potential(4, [0.5, 1.0, 9.0]), 0.0)


def test_potential_domain():
    with pytest.raises(ValueError):
        conformal_potential(3, 0.0)
    with pytest.raises(ValueError):
        conformal_potential(3, [1.0, -2.0])


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 6, 7])
def test_potential_solves_stationary_equation_by_hand(d):
    # V = c/r^2: V'' = 6c/r^4, V' = -2c/r^3, so Laplacian = 2c(4-d)/r^4 = c^2/(2 r^4)
    c = 4 * (4 - d)
    for r in (0.5, 1.0, 2.3):
        lap = 6 * c / r**4 + (d - 1) / r * (-2 * c / r**3)
        assert lap == pytest.approx(0.5 * conformal_potential(d, r) ** 2, rel=1e-14, abs=1e-14)


def test_radial_laplacian_exact_on_quadratic():
    r = np.linspace(1.0, 2.0, 33)
    for d in (1, 3, 5):
        np.testing.assert_allclose(radial_laplacian(r**2, r, d), 2.0 * d, rtol=1e-10)


def test_residual_second_order_d1():
    g = RadialGrid(1.0, 2.0, 201, 1)
    r0, r1 = stationarity_residual(g), stationarity_residual(g.refined())
    assert r0 <= 200 * g.h**2
    assert 3.5 <= r0 / r1 <= 4.5


def test_residual_second_order_d3():
    g = RadialGrid(0.5, 3.0, 401, 3)
    ratio = stationarity_residual(g) / stationarity_residual(g.refined())
    assert 3.5 <= ratio <= 4.5


def test_residual_d4_exactly_zero():
    g = RadialGrid(1.0, 2.0, 201, 4)
    assert stationarity_residual(g) == 0.0
    assert math.isnan(convergence_order(g))


@pytest.mark.parametrize("d", [1, 2, 3, 5, 6])
def test_convergence_order_all_dimensions(d):
    assert abs(convergence_order(RadialGrid(1.0, 2.0, 201, d), levels=2) - 2.0) <= 0.3


def test_refined_grid():
    g = RadialGrid(1.0, 2.0, 17, 2).refined()
    assert g.points == 33 and g.h == pytest.approx(1 / 32)
    assert g.r[0] == 1.0 and g.r[-1] == 2.0


@pytest.mark.parametrize(
    "args",
    [(1.0, 2.0, 15, 3), (0.0, 2.0, 100, 3), (2.0, 1.0, 100, 3), (1.0, 2.0, 100, 0)],
)
def test_grid_validation(args):
    with pytest.raises(GridError):
        RadialGrid(*args)
