"""Finite-difference check that V = 4(4-d)/r^2 solves Delta V = V^2/2 radially."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError

MIN_POINTS = 16


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    points: int
    d: int

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise GridError("need 0 < r_min < r_max")
        if self.points < MIN_POINTS:
            raise GridError(f"need at least {MIN_POINTS} grid points, got {self.points}")
        if int(self.d) < 1:
            raise GridError("dimension d must be a positive integer")

    @property
    def h(self):
        return (self.r_max - self.r_min) / (self.points - 1)

    @property
    def r(self):
        return np.linspace(self.r_min, self.r_max, self.points)

    def refined(self):
        """Same interval with the spacing halved."""
        return RadialGrid(self.r_min, self.r_max, 2 * (self.points - 1) + 1, self.d)


def conformal_potential(d: int, r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be positive")
    out = 4.0 * (4 - d) / r**2
    return float(out) if out.ndim == 0 else out


def radial_laplacian(V, r, d):
    """V'' + (d-1)/r V' at interior points, second-order central differences."""
    h = r[1] - r[0]
    d2 = (V[2:] - 2.0 * V[1:-1] + V[:-2]) / h**2
    d1 = (V[2:] - V[:-2]) / (2.0 * h)
    return d2 + (d - 1) / r[1:-1] * d1


def stationarity_residual(g: RadialGrid) -> float:
    """max over interior points of |Delta V - V^2/2|."""
    r = g.r
    V = conformal_potential(g.d, r)
    res = radial_laplacian(V, r, g.d) - 0.5 * V[1:-1] ** 2
    return float(np.max(np.abs(res)))


def convergence_order(g: RadialGrid, levels: int = 1) -> float:
    """log2 of the residual ratio over ``levels`` successive halvings (averaged).

    NaN when the residual is identically zero (d = 4).
    """
    res = [stationarity_residual(g)]
    for _ in range(levels):
        g = g.refined()
        res.append(stationarity_residual(g))
    if res[-1] == 0 or res[0] == 0:
        return float("nan")
    return math.log2(res[0] / res[-1]) / levels
