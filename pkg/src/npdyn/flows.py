"""Continuous dynamics: vector fields, finite-difference Jacobians and
fixed-step integrators with monitored quantities."""

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import BlowUpError, ConvergenceError, EvaluationError, IntegrationError

DEFAULT_H = 1e-5

METHODS = ("rk4", "implicit_midpoint")


@dataclass(frozen=True)
class VectorField:
    """A map v: R^N -> R^N, optionally with its analytic Jacobian.

    ``analytic_jacobian(x)[m, n]`` is dv_m/dx_n.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    analytic_jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x, h=DEFAULT_H):
        if self.analytic_jacobian is not None:
            return np.asarray(self.analytic_jacobian(np.asarray(x, dtype=float)), dtype=float)
        return jacobian_fd(self, x, h)


def fd_steps(x, h=DEFAULT_H):
    """Per-coordinate central-difference steps h * max(1, |x_n|)."""
    return h * np.maximum(1.0, np.abs(np.asarray(x, dtype=float)))


def central_jacobian(fn, x, h=DEFAULT_H):
    """Central-difference Jacobian of an arbitrary array map.

    Column ``n`` holds d fn / d x_n. Raises :class:`EvaluationError` naming
    the coordinate whose stencil produced a non-finite value.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise EvaluationError("non-finite evaluation point")
    steps = fd_steps(x, h)
    cols = []
    for n in range(x.shape[0]):
        xp = x.copy()
        xm = x.copy()
        xp[n] += steps[n]
        xm[n] -= steps[n]
        fp = np.asarray(fn(xp), dtype=float)
        fm = np.asarray(fn(xm), dtype=float)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise EvaluationError(
                f"non-finite field value on the stencil of coordinate {n}", coordinate=n
            )
        # divide by the realised step, not the nominal one
        cols.append((fp - fm) / (xp[n] - xm[n]))
    return np.stack(cols, axis=-1)


def central_gradient(fn, x, h=DEFAULT_H):
    """Central-difference gradient of a scalar function."""
    return central_jacobian(lambda y: np.atleast_1d(fn(y)), x, h)[0]


def jacobian_fd(v: VectorField, x, h: float = DEFAULT_H) -> np.ndarray:
    """Finite-difference estimate J[m, n] of dv_m/dx_n at ``x``."""
    if h <= 0:
        raise ValueError("h must be positive")
    return central_jacobian(v, x, h)


def divergence_fd(v: VectorField, x, h: float = DEFAULT_H) -> float:
    return float(np.trace(jacobian_fd(v, x, h)))


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 1.0
    record_every: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not (self.dt > 0 and self.t_end > 0):
            raise ValueError("dt and t_end must be positive")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if int(self.record_every) < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        n = self.times.shape[0]
        if self.states.shape[0] != n:
            raise ValueError("states count must equal times count")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        self.monitors = {k: np.asarray(m, dtype=float) for k, m in self.monitors.items()}
        for k, m in self.monitors.items():
            if m.shape != (n,):
                raise ValueError(f"monitor {k!r} has {m.shape[0]} values for {n} samples")

    def __len__(self):
        return self.times.shape[0]

    @property
    def final(self):
        return self.states[-1]

    def drift(self, name):
        """(initial, max absolute drift, max relative drift) of one monitor.

        Relative drift is normalised by max(1, |initial|).
        """
        m = self.monitors[name]
        d = float(np.max(np.abs(m - m[0]))) if m.size else 0.0
        return float(m[0]), d, d / max(1.0, abs(float(m[0])))


def rk4_step(f, x, dt):
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


MIDPOINT_TOL = 1e-12
MIDPOINT_MAXITER = 100


def implicit_midpoint_step(f, x, dt, tol=MIDPOINT_TOL, maxiter=MIDPOINT_MAXITER):
    """x' = x + dt f((x + x') / 2), stage slope found by fixed-point iteration."""
    k = f(x)
    for _ in range(maxiter):
        k_new = f(x + 0.5 * dt * k)
        res = float(np.max(np.abs(k_new - k)))
        k = k_new
        if res <= tol * max(1.0, float(np.max(np.abs(k)))):
            return x + dt * k
        if not math.isfinite(res):
            break
    raise ConvergenceError(f"implicit midpoint did not converge in {maxiter} iterations")


_STEPPERS = {"rk4": rk4_step, "implicit_midpoint": implicit_midpoint_step}


def integrate(
    v: VectorField,
    x0,
    cfg: IntegratorConfig,
    monitors: Optional[Mapping[str, Callable[[np.ndarray], float]]] = None,
) -> Trajectory:
    """Integrate ``v`` from t=0 to ``cfg.t_end`` with fixed steps.

    The last step is shortened so the trajectory ends exactly at ``t_end``.
    Samples are taken at t=0, every ``record_every`` steps, and at the end.
    On failure the raised :class:`IntegrationError` carries the samples
    recorded so far in its ``partial`` attribute.
    """
    x = np.array(x0, dtype=float)
    if x.shape != (v.dim,):
        raise ValueError(f"initial state has shape {x.shape}, field dimension is {v.dim}")
    if not np.all(np.isfinite(x)):
        raise BlowUpError("non-finite initial state", t=0.0)
    monitors = dict(monitors or {})
    step = _STEPPERS[cfg.method]
    n_steps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-9))

    times = [0.0]
    states = [x.copy()]

    def build():
        mon = {k: [float(fn(s)) for s in states] for k, fn in monitors.items()}
        return Trajectory(np.array(times), np.array(states), mon)

    t = 0.0
    for i in range(1, n_steps + 1):
        dt = cfg.dt if i < n_steps else cfg.t_end - (n_steps - 1) * cfg.dt
        try:
            x_new = step(v, x, dt)
        except IntegrationError as exc:
            if exc.t is None:
                exc.t = t
            exc.partial = build()
            raise
        if not np.all(np.isfinite(x_new)):
            err = BlowUpError(f"state became non-finite after t={t:.6g}", t=t)
            err.partial = build()
            raise err
        x = x_new
        t = cfg.t_end if i == n_steps else i * cfg.dt
        if i % cfg.record_every == 0 or i == n_steps:
            times.append(t)
            states.append(x.copy())
    return build()


def rotation_field() -> VectorField:
    """v = (x2, -x1): clockwise rotation, divergence free."""
    jac = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return VectorField(
        2, lambda x: np.array([x[1], -x[0]]), lambda x: jac.copy(), name="rotation"
    )


def linear_field(a) -> VectorField:
    a = np.array(a, dtype=float)
    return VectorField(a.shape[0], lambda x: a @ x, lambda x: a.copy(), name="linear")
