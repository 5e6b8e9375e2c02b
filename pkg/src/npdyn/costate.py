"""Costate extension of a flow and the structures built on it.

The extended system pairs the state ``x`` with a costate ``psi`` evolving
by the negative transposed Jacobian. Its generator ``H1 = v(x) . psi`` is
conserved. Invariant antisymmetric tensors (the polynomial-in-psi
integrals) are handled through their commuting coefficient arrays, stored
in canonical form: one value per strictly increasing index tuple.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateOrderError, ShapeError, SingularStructureError
from .flows import DEFAULT_H, VectorField, central_gradient, central_jacobian


@dataclass(frozen=True)
class CostateState:
    x: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "psi", np.asarray(self.psi, dtype=float))
        if self.x.shape != self.psi.shape:
            raise ShapeError("x and psi must have equal length")

    @property
    def y(self):
        """Stacked first-order variables (y^1, y^2) = (x, psi)."""
        return np.concatenate([self.x, self.psi])

    @classmethod
    def from_y(cls, y):
        y = np.asarray(y, dtype=float)
        n = y.shape[0] // 2
        return cls(y[:n], y[n:])


def extend(v: VectorField) -> VectorField:
    """Extended field on (x, psi): xdot = v(x), psidot_n = -sum_m dv_m/dx_n psi_m."""
    n = v.dim

    def ev(y):
        x, psi = y[:n], y[n:]
        return np.concatenate([v(x), -v.jacobian(x).T @ psi])

    return VectorField(2 * n, ev, name=f"extended {v.name}".strip())


def extend_with_tangent(v: VectorField) -> VectorField:
    """(x, psi, dx) with dx transported by the forward linearisation.

    ``psi . dx`` is constant along solutions.
    """
    n = v.dim

    def ev(y):
        x, psi, dx = y[:n], y[n : 2 * n], y[2 * n :]
        jac = v.jacobian(x)
        return np.concatenate([v(x), -jac.T @ psi, jac @ dx])

    return VectorField(3 * n, ev, name=f"tangent-extended {v.name}".strip())


def h1(v: VectorField, s: CostateState) -> float:
    """First-level Hamiltonian sum_n v_n(x) psi_n."""
    if s.x.shape != (v.dim,):
        raise ShapeError("state dimension does not match the field")
    return float(np.dot(v(s.x), s.psi))


def h1_monitor(v: VectorField):
    n = v.dim
    return lambda y: float(np.dot(v(y[:n]), y[n : 2 * n]))


def bracket1(F, G, s: CostateState, h: float = DEFAULT_H) -> float:
    """First-level bracket sum_n (dF/dx_n dG/dpsi_n - dF/dpsi_n dG/dx_n).

    ``F`` and ``G`` are called as ``F(x, psi)``.
    """
    n = s.x.shape[0]
    y = s.y
    gf = central_gradient(lambda z: F(z[:n], z[n:]), y, h)
    gg = central_gradient(lambda z: G(z[:n], z[n:]), y, h)
    return float(np.dot(gf[:n], gg[n:]) - np.dot(gf[n:], gg[:n]))


# -- antisymmetric tensors ---------------------------------------------------


def _perm_sign(seq):
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class AntisymmetricArray:
    """Fully antisymmetric order-n array over dimension N in canonical storage.

    ``values[i]`` belongs to the i-th strictly increasing index tuple in
    lexicographic order (``itertools.combinations`` order). Indexing with
    any tuple returns the signed component.
    """

    def __init__(self, order, dim, values=None):
        if order < 1:
            raise ValueError("order must be >= 1")
        if order > dim:
            raise DegenerateOrderError(f"order {order} exceeds dimension {dim}")
        self.order = order
        self.dim = dim
        self.keys = list(itertools.combinations(range(dim), order))
        self._pos = {k: i for i, k in enumerate(self.keys)}
        if values is None:
            values = np.zeros(len(self.keys))
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.keys),):
            raise ShapeError(f"expected {len(self.keys)} canonical values")

    def __getitem__(self, idx):
        idx = tuple(int(i) for i in idx)
        sign = _perm_sign(idx)
        if sign == 0:
            return 0.0
        return sign * self.values[self._pos[tuple(sorted(idx))]]

    def __repr__(self):
        return f"AntisymmetricArray(order={self.order}, dim={self.dim}, values={self.values!r})"

    def to_dense(self):
        out = np.zeros((self.dim,) * self.order)
        for k, val in zip(self.keys, self.values):
            for perm in itertools.permutations(range(self.order)):
                idx = tuple(k[p] for p in perm)
                out[idx] = _perm_sign(perm) * val
        return out

    @classmethod
    def from_dense(cls, dense):
        """Antisymmetric projection (1/n!) sum_sigma sgn(sigma) dense[sigma(k)]."""
        dense = np.asarray(dense, dtype=float)
        order, dim = dense.ndim, dense.shape[0]
        keys = list(itertools.combinations(range(dim), order))
        perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(order))]
        vals = np.empty(len(keys))
        for i, k in enumerate(keys):
            vals[i] = sum(sg * dense[tuple(k[j] for j in p)] for p, sg in perms)
        return cls(order, dim, vals / math.factorial(order))

    @classmethod
    def vector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(1, v.shape[0], v)


@dataclass(frozen=True)
class AntisymmetricTensorField:
    """x -> A_{k1...kn}(x). ``coeffs`` returns an AntisymmetricArray."""

    order: int
    dim: int
    coeffs: Callable[[np.ndarray], AntisymmetricArray]

    def __post_init__(self):
        if self.order > self.dim:
            raise DegenerateOrderError(f"order {self.order} exceeds dimension {self.dim}")

    def __call__(self, x):
        return self.coeffs(np.asarray(x, dtype=float))

    @classmethod
    def from_vector_field(cls, v: VectorField):
        return cls(1, v.dim, lambda x: AntisymmetricArray.vector(v(x)))

    @classmethod
    def from_function(cls, dim, fn):
        """Order-1 tensor from a map x -> covector."""
        return cls(1, dim, lambda x: AntisymmetricArray.vector(fn(x)))

    @classmethod
    def constant(cls, arr: AntisymmetricArray):
        return cls(arr.order, arr.dim, lambda x: arr)


def mbky_residual(
    A: AntisymmetricTensorField, v: VectorField, x, h: float = DEFAULT_H
) -> AntisymmetricArray:
    """Transport derivative of A along the flow of v.

    (D/Dt A)_{k1..kn} = A_{k1..kn,k} v_k - sum_j A_{k1..k..kn} dv_{kj}/dx_k,
    with the index k in slot j. Zero exactly when sum A psi...psi is an
    integral of the extended flow.
    """
    if A.dim != v.dim:
        raise ShapeError("tensor and field dimensions differ")
    if A.order > A.dim:
        raise DegenerateOrderError(f"order {A.order} exceeds dimension {A.dim}")
    x = np.asarray(x, dtype=float)
    n = A.order
    dense = A(x).to_dense()
    # directional derivative along v: sum_k dA/dx_k v_k
    dA = central_jacobian(lambda z: A(z).values, x, h)
    transport = dA @ v(x)
    jac = v.jacobian(x, h)
    out = AntisymmetricArray(n, A.dim, transport)
    for j in range(n):
        # sum_k A[..., k (slot j), ...] J[a, k] placed back at slot j
        term = np.moveaxis(np.tensordot(dense, jac, axes=([j], [1])), -1, j)
        out.values -= AntisymmetricArray.from_dense(term).values
    return out


def wedge(*factors: AntisymmetricTensorField) -> AntisymmetricTensorField:
    """Completely antisymmetrised product of order-1 tensors, 1/M! normalised.

    Canonical component K equals det[A^(i)_{K_j}] / M!.
    """
    if not factors:
        raise ValueError("wedge needs at least one factor")
    dim = factors[0].dim
    if any(f.order != 1 for f in factors):
        raise ValueError("wedge factors must be order-1 tensors")
    if any(f.dim != dim for f in factors):
        raise ShapeError("wedge factors must share a dimension")
    m = len(factors)
    if m > dim:
        raise DegenerateOrderError(f"wedge of {m} factors in dimension {dim} vanishes")
    keys = list(itertools.combinations(range(dim), m))
    cols = np.array(keys, dtype=np.intp)
    norm = math.factorial(m)

    def coeffs(x):
        rows = np.stack([f(x).values for f in factors])  # (m, dim)
        sub = rows[:, cols]  # (m, n_keys, m)
        vals = np.linalg.det(np.moveaxis(sub, 1, 0)) / norm
        return AntisymmetricArray(m, dim, vals)

    return AntisymmetricTensorField(m, dim, coeffs)


# -- Faddeev-Jackiw ----------------------------------------------------------


@dataclass(frozen=True)
class OneForm:
    """x -> f_n(x), the coefficients of a first-order Lagrangian f_n xdot_n - H."""

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)


SINGULAR_TOL = 1e-12


def structure_matrix(f: OneForm, x, h: float = DEFAULT_H) -> np.ndarray:
    """f_mn = d_m f_n - d_n f_m by central differences."""
    jf = central_jacobian(f, x, h)  # jf[n, m] = d f_n / d x_m
    return jf.T - jf


def fj_bracket(f: OneForm, x, h: float = DEFAULT_H) -> np.ndarray:
    """Fundamental bracket matrix {x_n, x_m} = (f^-1)_nm."""
    fm = structure_matrix(f, x, h)
    scale = float(np.max(np.abs(fm))) if fm.size else 0.0
    det = np.linalg.det(fm) if scale > 0 else 0.0
    if scale == 0 or abs(det) < SINGULAR_TOL * scale ** fm.shape[0]:
        raise SingularStructureError(
            f"structure two-form is singular at x (det={det:.3g}); the system is constrained"
        )
    return np.linalg.inv(fm)


def fj_flow(f: OneForm, H, x, h: float = DEFAULT_H) -> np.ndarray:
    """Velocity xdot_n = (f^-1)_nm dH/dx_m."""
    return fj_bracket(f, x, h) @ central_gradient(H, x, h)


def first_order_one_form(dim: int) -> OneForm:
    """One-form of the costate Lagrangian in y = (x, psi) variables.

    (xdot - v) . psi equals, up to a total derivative,
    (1/2)(xdot . psi - psidot . x) - v . psi, whose coefficients are
    f^1_n = psi_n / 2 and f^2_n = -x_n / 2.
    """

    def ev(y):
        return 0.5 * np.concatenate([y[dim:], -y[:dim]])

    return OneForm(2 * dim, ev)


def first_order_hamiltonian(v: VectorField):
    """H(y) = v_n(y^1) y^2_n."""
    n = v.dim
    return lambda y: float(np.dot(v(y[:n]), y[n:]))

