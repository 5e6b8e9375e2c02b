"""Point vortices in the plane and the reduced three-vortex system.

Velocities follow  zdot_n = i sum_{m != n} g_m / (conj(z_n) - conj(z_m))
with no 2*pi factor. States for the integrators are interleaved real
pairs (x1, y1, x2, y2, ...).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import CollisionError, ConfigError, DimensionError
from .flows import VectorField
from .nambu import NambuSystem

COLLISION_EPS = 1e-9


def _pair(code, n):
    return divmod(int(code), n)


def _raise_collision(code, n, eps):
    i, j = _pair(code, n)
    raise CollisionError(
        f"vortices {i + 1} and {j + 1} are closer than {eps:g}", pair=(i, j)
    )


def to_interleaved(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.shape[0])
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def from_interleaved(xy) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    return xy[0::2] + 1j * xy[1::2]


@dataclass(frozen=True)
class VortexConfiguration:
    """Circulations and complex positions of N point vortices.

    With ``unit`` set, circulations are quantised: each gamma / unit must be a
    nonzero integer (see :meth:`quantized`).
    """

    gammas: np.ndarray
    positions: np.ndarray
    unit: Optional[float] = None
    collision_eps: float = COLLISION_EPS

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        z = np.atleast_1d(np.asarray(self.positions, dtype=complex))
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "positions", z)
        if g.shape != z.shape or g.ndim != 1:
            raise ConfigError("gammas and positions must be 1-D arrays of equal length")
        if np.any(g == 0) or not np.all(np.isfinite(g)):
            raise ConfigError("circulations must be finite and nonzero")
        if not np.all(np.isfinite(z)):
            raise ConfigError("positions must be finite")
        if self.unit is not None:
            q = g / self.unit
            if not np.allclose(q, np.round(q), rtol=0, atol=1e-9) or np.any(np.round(q) == 0):
                raise ConfigError("quantized circulations must be nonzero integer multiples of unit")
        d = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(d, np.inf)
        if d.size and d.min() < self.collision_eps:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            i, j = min(i, j), max(i, j)
            raise CollisionError(f"vortices {i + 1} and {j + 1} coincide", pair=(int(i), int(j)))

    @classmethod
    def quantized(cls, levels, positions, unit=1.0):
        """Circulations gamma_n = unit * n_n for nonzero integers n_n."""
        levels = np.asarray(levels)
        if not np.all(np.equal(np.mod(levels, 1), 0)) or np.any(levels == 0):
            raise ConfigError("quantum numbers must be nonzero integers")
        return cls(unit * levels.astype(float), positions, unit=unit)

    @property
    def n(self):
        return self.gammas.shape[0]

    @property
    def state(self):
        return to_interleaved(self.positions)

    def with_state(self, xy):
        return VortexConfiguration(self.gammas, from_interleaved(xy), self.unit, self.collision_eps)


def _velocity(xy, gammas, eps):
    out = np.empty_like(xy)
    code = kernels.vortex_velocity(xy, gammas, eps * eps, out)
    if code >= 0:
        _raise_collision(code, gammas.shape[0], eps)
    return out


def _jacobian(xy, gammas, eps):
    out = np.empty((xy.shape[0], xy.shape[0]))
    code = kernels.vortex_jacobian(xy, gammas, eps * eps, out)
    if code >= 0:
        _raise_collision(code, gammas.shape[0], eps)
    return out


def _energy(xy, gammas, eps):
    val, code = kernels.vortex_energy(xy, gammas, eps * eps)
    if code >= 0:
        _raise_collision(code, gammas.shape[0], eps)
    return float(val)


def vortex_rhs(c: VortexConfiguration) -> np.ndarray:
    """Complex velocities zdot_n."""
    return from_interleaved(_velocity(c.state, c.gammas, c.collision_eps))


def vortex_hamiltonian(c: VortexConfiguration) -> float:
    """sum over ordered pairs n != m of g_n g_m ln|z_n - z_m|."""
    return _energy(c.state, c.gammas, c.collision_eps)


def vortex_field(gammas, collision_eps: float = COLLISION_EPS) -> VectorField:
    """Interleaved-state vector field with analytic Jacobian."""
    g = np.ascontiguousarray(gammas, dtype=float)
    return VectorField(
        2 * g.shape[0],
        lambda xy: _velocity(np.ascontiguousarray(xy, dtype=float), g, collision_eps),
        lambda xy: _jacobian(np.ascontiguousarray(xy, dtype=float), g, collision_eps),
        name=f"{g.shape[0]}-vortex",
    )


def hamiltonian_monitor(gammas, collision_eps: float = COLLISION_EPS):
    g = np.ascontiguousarray(gammas, dtype=float)
    return lambda xy: _energy(np.ascontiguousarray(xy, dtype=float), g, collision_eps)


def impulse(gammas, xy) -> complex:
    """Linear impulse sum_n g_n z_n."""
    return complex(np.dot(np.asarray(gammas, dtype=float), from_interleaved(xy)))


# -- three-vortex reduction ---------------------------------------------------


@dataclass(frozen=True)
class ReducedState:
    """u_i = ln|z_j - z_k|^2 for cyclic (i, j, k)."""

    u: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        object.__setattr__(self, "gammas", np.asarray(self.gammas, dtype=float))
        if self.u.shape != (3,) or self.gammas.shape != (3,):
            raise DimensionError("reduced state needs three u values and three circulations")
        if not np.all(np.isfinite(self.u)):
            raise ConfigError("u must be finite")


def reduce3(c: VortexConfiguration) -> ReducedState:
    if c.n != 3:
        raise DimensionError(f"reduction needs exactly 3 vortices, got {c.n}")
    z = c.positions
    d = np.array([z[1] - z[2], z[2] - z[0], z[0] - z[1]])
    r2 = d.real**2 + d.imag**2
    if np.any(r2 < c.collision_eps**2):
        i = int(np.argmin(r2))
        raise CollisionError("coincident vortices in reduction", pair=((i + 1) % 3, (i + 2) % 3))
    return ReducedState(np.log(r2), c.gammas)


def reduced_rhs(s: ReducedState) -> np.ndarray:
    """udot_i = g_i (e^{u_j} - e^{u_k}) with (i, j, k) cyclic."""
    e = np.exp(s.u)
    return s.gammas * (np.roll(e, -1) - np.roll(e, -2))


def reduced_integrals(s: ReducedState):
    """(H1, H2) = (sum e^{u_i}/g_i, sum u_i/g_i)."""
    return float(np.sum(np.exp(s.u) / s.gammas)), float(np.sum(s.u / s.gammas))


def reduced_field(gammas) -> VectorField:
    g = np.asarray(gammas, dtype=float)

    def jac(u):
        e = np.exp(u)
        m = np.zeros((3, 3))
        for i in range(3):
            m[i, (i + 1) % 3] = g[i] * e[(i + 1) % 3]
            m[i, (i + 2) % 3] = -g[i] * e[(i + 2) % 3]
        return m

    return VectorField(3, lambda u: reduced_rhs(ReducedState(u, g)), jac, name="reduced3")


def reduced_monitors(gammas):
    g = np.asarray(gammas, dtype=float)
    return {
        "H1": lambda u: float(np.sum(np.exp(u) / g)),
        "H2": lambda u: float(np.sum(u / g)),
    }


def reduced_nambu_system(gammas, analytic: bool = True) -> NambuSystem:
    """The reduced system as a Nambu flow with weight g1 g2 g3."""
    g = np.asarray(gammas, dtype=float)
    mon = reduced_monitors(g)
    grads = None
    if analytic:
        inv = 1.0 / g
        grads = [lambda u: np.exp(u) * inv, lambda u: inv.copy()]
    return NambuSystem(3, [mon["H1"], mon["H2"]], float(np.prod(g)), grads, names=("H1", "H2"))


def reduction_mismatch(c: VortexConfiguration, cfg) -> dict:
    """Compare reduce3 of a full trajectory with the reduced flow.

    The reduced equations agree with the full dynamics only up to a
    state-dependent time change, so the pointwise gap is a diagnostic.
    Both H1 and H2 are still conserved along reduce3 of the full orbit.
    """
    from .flows import integrate

    full = integrate(vortex_field(c.gammas, c.collision_eps), c.state, cfg)
    red = integrate(reduced_field(c.gammas), reduce3(c).u, cfg)
    u_full = np.array([reduce3(c.with_state(s)).u for s in full.states])
    gap = np.abs(u_full - red.states)
    h = np.array([reduced_integrals(ReducedState(u, c.gammas)) for u in u_full])
    return {
        "max_u_gap": float(gap.max()),
        "final_u_gap": float(gap[-1].max()),
        "H1_drift_along_full": float(np.max(np.abs(h[:, 0] - h[0, 0]))),
        "H2_drift_along_full": float(np.max(np.abs(h[:, 1] - h[0, 1]))),
    }
