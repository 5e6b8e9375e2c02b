"""Discrete dynamical systems S(k+1) = step(S(k)) and their linear costate.

The costate row vector l(k) co-evolves as l(k+1) = l(k) M^-1 where
M = d step / d S. Two evaluation points for M are supported:

``"verbatim"``
    M taken at S(k+1). This is the forward form of the backward relation
    l(k-1) = l(k) M(S(k)); the conserved pairing is l(k) . dS(k+1).
``"pre_step"``
    M taken at S(k); the conserved pairing is l(k) . dS(k).

If ``l`` holds Python ints or Fractions (object dtype) and M is integer or
rational, the update is carried out in exact rational arithmetic.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import EvaluationError, IrreversibilityError, ShapeError
from .flows import DEFAULT_H, VectorField, central_jacobian, jacobian_fd

MODES = ("verbatim", "pre_step")


@dataclass(frozen=True)
class DiscreteSystem:
    dim: int
    step: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse_step: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, S):
        return self.step(S)

    def matrix(self, S, h=DEFAULT_H):
        """M[n, m] = d step_n / d S_m, analytic when available."""
        if self.jacobian is not None:
            M = np.asarray(self.jacobian(S))
        else:
            M = central_jacobian(self.step, np.asarray(S, dtype=float), h)
        if M.dtype != object and not np.all(np.isfinite(M)):
            raise EvaluationError("non-finite entries in the step Jacobian")
        return M


@dataclass(frozen=True)
class ExtendedDiscreteState:
    S: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        if np.shape(self.S) != np.shape(self.l):
            raise ShapeError("S and l must have equal length")


@dataclass(frozen=True)
class ReversibilityReport:
    reversible: bool
    det: float
    condition: float


def _scale(M):
    # Hadamard bound: |det M| <= product of row norms
    return float(np.prod(np.linalg.norm(M, axis=1)))


def reversibility(sys: DiscreteSystem, S, tol: float = 1e-12) -> ReversibilityReport:
    """Classify the step at S as reversible iff |det M| > tol * prod(row norms)."""
    M = np.asarray(sys.matrix(S), dtype=float)
    if not np.all(np.isfinite(M)):
        raise EvaluationError("non-finite entries in the step Jacobian")
    det = float(np.linalg.det(M))
    scale = _scale(M)
    ok = scale > 0 and abs(det) > tol * scale
    cond = float(np.linalg.cond(M)) if ok else float("inf")
    return ReversibilityReport(bool(ok), det, cond)


def _solve_left_exact(M, l):
    """Row vector x with x M = l, by Gaussian elimination over Fractions."""
    n = len(l)
    M = np.asarray(M).tolist()
    # x M = l  <=>  M^T x^T = l^T
    a = [[Fraction(M[j][i]) for j in range(n)] + [Fraction(l[i])] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise IrreversibilityError("step Jacobian is singular; the map is irreversible")
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = np.empty(n, dtype=object)
    for i in range(n):
        q = a[i][n] / a[i][i]
        out[i] = q.numerator if q.denominator == 1 else q
    return out


def _solve_left(M, l, tol=1e-12):
    if np.asarray(l).dtype == object:
        return _solve_left_exact(M, l)
    M = np.asarray(M, dtype=float)
    scale = _scale(M)
    det = np.linalg.det(M)
    if scale == 0 or abs(det) <= tol * scale:
        raise IrreversibilityError(
            f"step Jacobian is singular (det={det:.3g}); the map is irreversible"
        )
    return np.linalg.solve(M.T, np.asarray(l, dtype=float))


def costate_step(
    sys: DiscreteSystem, es: ExtendedDiscreteState, mode: str = "verbatim"
) -> ExtendedDiscreteState:
    """Advance (S, l) one step: S -> step(S), l -> l M^-1."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    S_next = sys.step(es.S)
    M = sys.matrix(S_next if mode == "verbatim" else es.S)
    return ExtendedDiscreteState(S_next, _solve_left(M, es.l))


def run_costate(sys, S0, l0, steps: int, mode: str = "verbatim"):
    """Orbit and costates for ``steps`` steps, as two lists of length steps + 1."""
    es = ExtendedDiscreteState(S0, l0)
    S, L = [es.S], [es.l]
    for _ in range(steps):
        es = costate_step(sys, es, mode)
        S.append(es.S)
        L.append(es.l)
    return S, L


def transport_tangent(sys, S, dS):
    """dS(k+1) = M(S(k)) dS(k); exact for object-dtype inputs with integer M."""
    M = sys.matrix(S)
    if np.asarray(dS).dtype == object:
        M = np.asarray(M).tolist()
        n = len(dS)
        return np.array([sum(M[i][j] * dS[j] for j in range(n)) for i in range(n)], dtype=object)
    return np.asarray(M, dtype=float) @ np.asarray(dS, dtype=float)


def pairing_series(sys, S0, l0, dS0, steps: int, mode: str = "verbatim"):
    """Values of the conserved costate/tangent pairing along an orbit.

    ``pre_step`` pairs l(k) with dS(k); ``verbatim`` pairs l(k) with dS(k+1).
    """
    S, L = run_costate(sys, S0, l0, steps, mode)
    dS = [dS0]
    for k in range(steps + 1):
        dS.append(transport_tangent(sys, S[k], dS[k]))
    shift = 1 if mode == "verbatim" else 0
    return [sum(a * b for a, b in zip(L[k], dS[k + shift])) for k in range(steps + 1)]


def discrete_hamiltonian(sys: DiscreteSystem, orbit, costates) -> float:
    """H = sum_k sum_n l_n(k) step_n(S(k))."""
    orbit = np.asarray(orbit, dtype=float)
    costates = np.asarray(costates, dtype=float)
    if orbit.ndim != 2 or orbit.shape != costates.shape or orbit.shape[1] != sys.dim:
        raise ShapeError(
            f"orbit {orbit.shape} and costates {costates.shape} must both be (K, {sys.dim})"
        )
    images = np.array([sys.step(s) for s in orbit], dtype=float).reshape(orbit.shape)
    return float(np.sum(costates * images))


# -- coherence criterion -----------------------------------------------------


@dataclass(frozen=True)
class CoherenceReport:
    taus: np.ndarray
    det: np.ndarray
    residual: np.ndarray
    divergence: float
    slope: float

    @property
    def first_order(self):
        """|div v|, the coefficient of tau in det M - 1."""
        return abs(self.divergence)

    def as_dict(self):
        return {
            "taus": self.taus.tolist(),
            "det": self.det.tolist(),
            "residual": self.residual.tolist(),
            "divergence": self.divergence,
            "slope": self.slope,
        }


def euler_map(v: VectorField, tau: float) -> DiscreteSystem:
    """Explicit step S + tau v(S), with Jacobian I + tau dv/dS."""
    eye = np.eye(v.dim)
    return DiscreteSystem(
        v.dim,
        lambda S: np.asarray(S, dtype=float) + tau * v(S),
        lambda S: eye + tau * v.jacobian(S),
        name=f"euler({v.name}, tau={tau:g})",
    )


def coherence_check(
    v: VectorField, x, taus=(1e-2, 5e-3, 2.5e-3), h: float = DEFAULT_H
) -> CoherenceReport:
    """Residual det M - 1 - tau div v for the maps id + tau v, and its order in tau.

    ``slope`` is the least-squares slope of log|residual| against log tau,
    NaN when every residual vanishes.
    """
    taus = np.asarray(taus, dtype=float)
    jac = jacobian_fd(v, x, h)
    div = float(np.trace(jac))
    # M = d(id + tau v)/dx = I + tau J, with the same J that gives div v
    eye = np.eye(v.dim)
    dets = np.array([np.linalg.det(eye + t * jac) for t in taus])
    res = dets - 1.0 - taus * div
    nz = np.abs(res) > 0
    slope = float("nan")
    if nz.sum() >= 2:
        slope = float(np.polyfit(np.log(taus[nz]), np.log(np.abs(res[nz])), 1)[0])
    return CoherenceReport(taus, dets, res, div, slope)


# -- example maps ------------------------------------------------------------

_CAT = np.array([[2, 1], [1, 1]])
_CAT_INV = np.array([[1, -1], [-1, 2]])


def _mod1(a):
    return np.array([x % 1 for x in a], dtype=a.dtype)


def cat_map() -> DiscreteSystem:
    """Arnold cat map on the unit torus (Fraction entries are kept exact)."""

    def step(S):
        S = np.asarray(S)
        return _mod1(_CAT.astype(S.dtype) @ S) if S.dtype == object else (_CAT @ S) % 1.0

    def inv(S):
        S = np.asarray(S)
        return _mod1(_CAT_INV.astype(S.dtype) @ S) if S.dtype == object else (_CAT_INV @ S) % 1.0

    return DiscreteSystem(2, step, lambda S: _CAT.copy(), inv, name="cat")


def shear_map() -> DiscreteSystem:
    """(S1 + S2^3, S2): nonlinear, volume preserving, inverse (S1 - S2^3, S2)."""

    def step(S):
        S = np.asarray(S, dtype=float)
        return np.array([S[0] + S[1] ** 3, S[1]])

    def inv(S):
        S = np.asarray(S, dtype=float)
        return np.array([S[0] - S[1] ** 3, S[1]])

    return DiscreteSystem(2, step, None, inv, name="shear")


def henon_map(a: float = 1.4, b: float = 0.3) -> DiscreteSystem:
    """(1 - a S1^2 + S2, b S1); det M = -b, reversible for b != 0."""

    def step(S):
        S = np.asarray(S, dtype=float)
        return np.array([1.0 - a * S[0] ** 2 + S[1], b * S[0]])

    def inv(S):
        S = np.asarray(S, dtype=float)
        x = S[1] / b
        return np.array([x, S[0] - 1.0 + a * x**2])

    return DiscreteSystem(2, step, None, inv, name="henon")


def fanout_map() -> DiscreteSystem:
    """Copying gate (S1, S1): rank one, irreversible."""
    return DiscreteSystem(
        2,
        lambda S: np.array([S[0], S[0]], dtype=float),
        lambda S: np.array([[1.0, 0.0], [1.0, 0.0]]),
        name="fanout",
    )


def identity_map(dim: int) -> DiscreteSystem:
    return DiscreteSystem(
        dim,
        lambda S: np.array(S, copy=True),
        lambda S: np.eye(dim),
        lambda S: np.array(S, copy=True),
        name="identity",
    )


def linear_map(M) -> DiscreteSystem:
    M = np.asarray(M, dtype=float)
    return DiscreteSystem(M.shape[0], lambda S: M @ S, lambda S: M.copy(), name="linear")
