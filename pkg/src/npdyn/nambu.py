"""Nambu-Poisson flows generated by p Hamiltonians in N dimensions.

    v_n = w * eps_{n m1...mp} dH_1/dx_{m1} ... dH_p/dx_{mp}

``eps`` on p+1 distinct indices is the sign of the permutation that sorts
them and zero on repeats. Every H_i is conserved and the flow is
divergence free, both by antisymmetry.
"""

import functools
import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._backend import kernels
from .errors import DegenerateOrderError, DimensionError
from .flows import DEFAULT_H, IntegratorConfig, VectorField, central_gradient, integrate


@functools.lru_cache(maxsize=None)
def levi_civita_table(dim: int, p: int):
    """Signed index rows (n, m1..mp) for every permutation of every (p+1)-subset."""
    if p + 1 > dim:
        raise DegenerateOrderError(f"{p} Hamiltonians need dimension > {p}, got {dim}")
    rows, signs = [], []
    base = list(range(p + 1))
    perms = []
    for perm in itertools.permutations(base):
        inv = sum(1 for i in range(p + 1) for j in range(i + 1, p + 1) if perm[i] > perm[j])
        perms.append((perm, -1.0 if inv % 2 else 1.0))
    for subset in itertools.combinations(range(dim), p + 1):
        for perm, sg in perms:
            rows.append([subset[k] for k in perm])
            signs.append(sg)
    rows = np.ascontiguousarray(rows, dtype=np.intp)
    signs = np.ascontiguousarray(signs, dtype=float)
    rows.setflags(write=False)
    signs.setflags(write=False)
    return rows, signs


def contract(grads: np.ndarray, weight: float = 1.0) -> np.ndarray:
    """Levi-Civita contraction of a (p, N) gradient stack into a velocity."""
    grads = np.ascontiguousarray(grads, dtype=float)
    p, dim = grads.shape
    rows, signs = levi_civita_table(dim, p)
    out = np.empty(dim)
    kernels.levi_civita_contract(grads, rows, signs, out)
    return weight * out


@dataclass(frozen=True)
class NambuSystem:
    """p Hamiltonians on R^N with a constant weight on the Levi-Civita symbol.

    ``gradients`` optionally supplies analytic gradients, one per Hamiltonian;
    otherwise central differences are used.
    """

    dim: int
    hamiltonians: Sequence[Callable[[np.ndarray], float]]
    weight: float = 1.0
    gradients: Optional[Sequence[Callable[[np.ndarray], np.ndarray]]] = None
    names: Sequence[str] = ()

    def __post_init__(self):
        p = len(self.hamiltonians)
        if p < 1:
            raise ValueError("need at least one Hamiltonian")
        if p > self.dim - 1:
            raise DegenerateOrderError(f"p={p} Hamiltonians require p <= N-1 = {self.dim - 1}")
        if not np.isfinite(self.weight) or self.weight == 0:
            raise ValueError("weight must be finite and nonzero")
        if self.gradients is not None and len(self.gradients) != p:
            raise ValueError("one gradient per Hamiltonian")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"H{i + 1}" for i in range(p)))

    @property
    def p(self):
        return len(self.hamiltonians)

    def grads(self, x, h=DEFAULT_H):
        if self.gradients is not None:
            return np.stack([np.asarray(g(x), dtype=float) for g in self.gradients])
        return np.stack([central_gradient(H, x, h) for H in self.hamiltonians])

    def as_field(self, h=DEFAULT_H) -> VectorField:
        return VectorField(self.dim, lambda x: nambu_flow(self, x, h), name="nambu")


def nambu_flow(sys: NambuSystem, x, h: float = DEFAULT_H) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.dim,):
        raise DimensionError(f"state has shape {x.shape}, system dimension is {sys.dim}")
    return contract(sys.grads(x, h), sys.weight)


def bracket3(A, B, C, u, weight: float = 1.0, h: float = DEFAULT_H) -> float:
    """{A, B, C} = w eps_ijk dA/du_i dB/du_j dC/du_k on R^3."""
    u = np.asarray(u, dtype=float)
    if u.shape != (3,):
        raise DimensionError("the 3-bracket is defined on three-dimensional phase space")
    g = np.stack([central_gradient(F, u, h) for F in (A, B, C)])
    # {A, B, C} = grad A . (w eps_ijk dB_j dC_k)
    return float(np.dot(g[0], contract(g[1:], weight)))


def hamiltonian_drift(
    sys: NambuSystem, x0, cfg: IntegratorConfig, h: float = DEFAULT_H
) -> dict:
    """Max relative drift |H_i(x(t)) - H_i(x0)| / max(1, |H_i(x0)|) per Hamiltonian."""
    monitors = dict(zip(sys.names, sys.hamiltonians))
    traj = integrate(sys.as_field(h), x0, cfg, monitors)
    return {name: traj.drift(name)[2] for name in sys.names}


@dataclass(frozen=True)
class Polynomial:
    """Sum of coeff * prod_n x_n**exponent[n]; exact gradients."""

    coeffs: np.ndarray
    exponents: np.ndarray  # (terms, dim) non-negative ints

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(self.coeffs * np.prod(x[None, :] ** self.exponents, axis=1)))

    def grad(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[0])
        for n in range(x.shape[0]):
            e = self.exponents.copy()
            c = self.coeffs * e[:, n]
            e[:, n] = np.maximum(e[:, n] - 1, 0)
            out[n] = np.sum(c * np.prod(x[None, :] ** e, axis=1))
        return out


def random_polynomial(dim: int, degree: int, rng, terms: int = 6) -> Polynomial:
    """Random polynomial with ``terms`` monomials of total degree <= ``degree``."""
    exps = np.zeros((terms, dim), dtype=int)
    for t in range(terms):
        for _ in range(rng.integers(1, degree + 1)):
            exps[t, rng.integers(dim)] += 1
    return Polynomial(rng.uniform(-1.0, 1.0, terms), exps)


def random_polynomial_system(dim: int, p: int, rng, degree: int = 3) -> NambuSystem:
    polys = [random_polynomial(dim, degree, rng) for _ in range(p)]
    return NambuSystem(dim, polys, 1.0, gradients=[q.grad for q in polys])


def euler_top(inertia=(1.0, 2.0, 3.0)) -> NambuSystem:
    """Free rigid body: kinetic energy and squared angular momentum."""
    inertia = np.asarray(inertia, dtype=float)

    def energy(L):
        return 0.5 * float(np.sum(L * L / inertia))

    def casimir(L):
        return 0.5 * float(np.dot(L, L))

    return NambuSystem(
        3,
        [energy, casimir],
        1.0,
        gradients=[lambda L: L / inertia, lambda L: np.array(L, dtype=float)],
        names=("E", "L2"),
    )


def oscillator() -> NambuSystem:
    """p = 1, N = 2: H = (x1^2 + x2^2)/2, giving v = (x2, -x1)."""
    return NambuSystem(
        2,
        [lambda x: 0.5 * float(np.dot(x, x))],
        1.0,
        gradients=[lambda x: np.array(x, dtype=float)],
        names=("H",),
    )
