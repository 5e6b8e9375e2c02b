import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from npdyn import costate, flows, nambu, vortex
from npdyn.costate import (
    AntisymmetricArray,
    AntisymmetricTensorField,
    CostateState,
    OneForm,
    bracket1,
    extend,
    fj_bracket,
    fj_flow,
    h1,
    mbky_residual,
    wedge,
)
from npdyn.errors import DegenerateOrderError, SingularStructureError
from npdyn.flows import IntegratorConfig, VectorField, integrate


def perm_sign(p):
    return (-1) ** sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


# -- extension and first-level Hamiltonian -------------------------------------


def test_extend_rotation_example():
    y = extend(flows.rotation_field())([1.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(y, [0.0, -1.0, 1.0, 0.0], atol=1e-14)


def test_extend_zero_field():
    v = VectorField(2, lambda x: np.zeros(2))
    assert np.all(extend(v)([1.0, 2.0, 3.0, 4.0]) == 0.0)


def test_linear_costate_matches_matrix_exponential(rng):
    a = rng.normal(size=(3, 3))
    psi0 = rng.normal(size=3)
    traj = integrate(extend(flows.linear_field(a)), np.r_[rng.normal(size=3), psi0], IntegratorConfig("rk4", 1e-3, 1.0))
    np.testing.assert_allclose(traj.final[3:], expm(-a.T) @ psi0, atol=1e-6)


def test_h1_examples():
    rot = flows.rotation_field()
    assert h1(rot, CostateState([1.0, 0.0], [0.0, 0.0])) == 0.0
    assert h1(rot, CostateState([1.0, 0.0], [0.0, 1.0])) == -1.0
    x = np.array([0.3, -2.0])
    assert h1(rot, CostateState(x, rot(x))) == pytest.approx(np.dot(rot(x), rot(x)))


@pytest.mark.parametrize(
    "v,x0",
    [
        (flows.rotation_field(), [1.0, 0.5]),
        (vortex.vortex_field([1.0, 1.0]), [1.0, 0.0, -1.0, 0.0]),
    ],
)
def test_h1_conserved(v, x0, rng):
    y0 = np.r_[x0, rng.uniform(-1, 1, v.dim)]
    traj = integrate(extend(v), y0, IntegratorConfig("rk4", 1e-3, 10.0), {"H1": costate.h1_monitor(v)})
    h0, d_abs, _ = traj.drift("H1")
    assert d_abs <= 1e-7 * max(1.0, abs(h0))


def test_costate_tangent_pairing_linear(rng):
    a = rng.normal(size=(3, 3)) * 0.5
    v = costate.extend_with_tangent(flows.linear_field(a))
    y0 = rng.normal(size=9)
    traj = integrate(v, y0, IntegratorConfig("rk4", 1e-3, 2.0), {"pair": lambda y: y[3:6] @ y[6:]})
    assert traj.drift("pair")[1] <= 1e-8


# -- first-level bracket -------------------------------------------------------


def test_bracket1_examples():
    s = CostateState([1.0, 2.0], [3.0, 4.0])
    assert bracket1(lambda x, p: x[0], lambda x, p: p[0], s) == pytest.approx(1.0, abs=1e-10)
    F = lambda x, p: x[0] * p[1] + x[1] ** 2  # noqa: E731
    assert bracket1(F, F, s) == pytest.approx(0.0, abs=1e-12)
    # dF/dx . dG/dpsi - dF/dpsi . dG/dx = psi2 x2 - x1 psi1 = 8 - 3
    got = bracket1(lambda x, p: x[0] * p[1], lambda x, p: x[1] * p[0], s)
    assert got == pytest.approx(5.0, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_bracket1_antisymmetric(seed):
    rng = np.random.default_rng(seed)
    pf, pg = (nambu.random_polynomial(4, 3, rng) for _ in range(2))
    F = lambda x, p: pf(np.r_[x, p])  # noqa: E731
    G = lambda x, p: pg(np.r_[x, p])  # noqa: E731
    s = CostateState(rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
    assert bracket1(F, G, s) == pytest.approx(-bracket1(G, F, s), abs=1e-9)


# -- antisymmetric storage -------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 5), order=st.integers(1, 3))
def test_canonical_storage_antisymmetric(seed, dim, order):
    if order > dim:
        return
    rng = np.random.default_rng(seed)
    arr = AntisymmetricArray(order, dim, rng.normal(size=math.comb(dim, order)))
    dense = arr.to_dense()
    for idx in itertools.product(range(dim), repeat=order):
        for i, j in itertools.combinations(range(order), 2):
            sw = list(idx)
            sw[i], sw[j] = sw[j], sw[i]
            assert arr[tuple(sw)] == -arr[idx]
        assert dense[idx] == arr[idx]
    back = AntisymmetricArray.from_dense(dense)
    np.testing.assert_allclose(back.values, arr.values, rtol=1e-14)


def test_order_above_dim_rejected():
    with pytest.raises(DegenerateOrderError):
        AntisymmetricArray(3, 2)


# -- MBKY transport --------------------------------------------------------------


def brute_mbky(dense_fn, v, x, h=1e-5):
    """Full-tensor loop over every index tuple; no antisymmetric storage."""
    x = np.asarray(x, dtype=float)
    N = x.shape[0]
    A = dense_fn(x)
    n = A.ndim
    dA, J = [], np.empty((N, N))
    for k in range(N):
        e = np.zeros(N)
        e[k] = h
        dA.append((dense_fn(x + e) - dense_fn(x - e)) / (2 * h))
        J[:, k] = (v(x + e) - v(x - e)) / (2 * h)
    vx = v(x)
    R = np.zeros(A.shape)
    for K in itertools.product(range(N), repeat=n):
        val = sum(dA[k][K] * vx[k] for k in range(N))
        for j in range(n):
            for k in range(N):
                K2 = list(K)
                K2[j] = k
                val -= A[tuple(K2)] * J[K[j], k]
        R[K] = val
    return R


def test_mbky_constant_tensor_rotation_example():
    rot = flows.rotation_field()
    A = AntisymmetricTensorField.constant(AntisymmetricArray.vector([1.0, 0.0]))
    x = np.array([0.4, -0.9])
    res = mbky_residual(A, rot, x)
    # -A_k dv_{k1}/dx_k = -J[:, 0] = (0, 1)
    np.testing.assert_allclose(res.values, [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(brute_mbky(lambda z: np.array([1.0, 0.0]), rot, x), [0.0, 1.0], atol=1e-9)


def test_mbky_constant_field_constant_tensor_is_zero():
    v = VectorField(4, lambda x: np.array([1.0, -2.0, 0.5, 3.0]))
    arr = AntisymmetricArray(3, 4, [1.0, 2.0, -1.0, 0.5])
    res = mbky_residual(AntisymmetricTensorField.constant(arr), v, [0.1, 0.2, 0.3, 0.4])
    assert np.all(res.values == 0.0)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_mbky_matches_brute_force(order, rng):
    dim = 4
    c, c2 = rng.normal(size=(2,) + (dim,) * order)
    q, q2 = rng.normal(size=(2, dim))

    def dense(x):
        t = c * np.sin(x @ q) + c2 * (x @ q2) ** 2
        return AntisymmetricArray.from_dense(t).to_dense()

    A = AntisymmetricTensorField(order, dim, lambda x: AntisymmetricArray.from_dense(dense(x)))
    v = VectorField(dim, lambda x: np.array([x[1] * x[2], -x[0] ** 2, np.sin(x[3]), x[0] - x[2]]))
    x = rng.uniform(-1, 1, dim)
    expected = brute_mbky(dense, v, x)
    got = mbky_residual(A, v, x).to_dense()
    assert np.abs(got - expected).max() <= 1e-7


def test_mbky_base_solution(rng):
    for v in (flows.rotation_field(), vortex.reduced_field([1.0, 2.0, 3.0]), vortex.vortex_field([1.0, 2.0])):
        A = AntisymmetricTensorField.from_vector_field(v)
        for _ in range(20):
            x = rng.uniform(-1, 1, v.dim)
            if v.dim == 4:
                x = x * 0.3 + [1, 0, -1, 0]
            assert np.abs(mbky_residual(A, v, x).values).max() <= 1e-6


def test_mbky_order_above_dim_rejected():
    A = AntisymmetricTensorField.__new__(AntisymmetricTensorField)
    object.__setattr__(A, "order", 3)
    object.__setattr__(A, "dim", 2)
    object.__setattr__(A, "coeffs", lambda x: None)
    with pytest.raises(DegenerateOrderError):
        mbky_residual(A, flows.rotation_field(), [0.0, 0.0])


# -- wedge -----------------------------------------------------------------------


def brute_wedge(vectors):
    """(1/M!) sum over permutations, written out on the full tensor."""
    M, N = len(vectors), len(vectors[0])
    out = np.zeros((N,) * M)
    for K in itertools.product(range(N), repeat=M):
        out[K] = sum(
            perm_sign(p) * np.prod([vectors[i][K[p[i]]] for i in range(M)])
            for p in itertools.permutations(range(M))
        ) / math.factorial(M)
    return out


def const(v):
    return AntisymmetricTensorField.constant(AntisymmetricArray.vector(v))


def test_wedge_self_vanishes():
    W = wedge(const([1.0, 2.0, 3.0]), const([1.0, 2.0, 3.0]))
    assert np.all(W([0, 0, 0]).values == 0.0)


def test_wedge_unit_covectors():
    w = wedge(const([1.0, 0.0, 0.0]), const([0.0, 1.0, 0.0]))([0, 0, 0])
    assert w[0, 1] == 0.5 and w[1, 0] == -0.5
    assert w[0, 2] == w[1, 2] == w[2, 0] == 0.0


@pytest.mark.parametrize("dim,m", [(3, 2), (4, 3), (4, 4), (5, 2)])
def test_wedge_matches_permutation_sum(dim, m, rng):
    vecs = rng.normal(size=(m, dim))
    got = wedge(*[const(v) for v in vecs])(np.zeros(dim)).to_dense()
    np.testing.assert_allclose(got, brute_wedge(vecs), atol=1e-12)


def test_wedge_top_degree_is_determinant(rng):
    vecs = rng.normal(size=(4, 4))
    w = wedge(*[const(v) for v in vecs])(np.zeros(4))
    assert w.values.shape == (1,)
    assert w.values[0] == pytest.approx(np.linalg.det(vecs) / 24, rel=1e-12)


def test_wedge_too_many_factors():
    with pytest.raises(DegenerateOrderError):
        wedge(const([1.0, 0.0]), const([0.0, 1.0]), const([1.0, 1.0]))


def test_wedge_of_invariants_is_invariant(rng):
    v = VectorField(3, lambda x: np.array([x[1], -x[0], 0.0]), lambda x: np.array([[0, 1.0, 0], [-1.0, 0, 0], [0, 0, 0]]))
    invariants = [
        AntisymmetricTensorField.from_vector_field(v),
        AntisymmetricTensorField.from_function(3, lambda x: np.array(x, dtype=float)),
        const([0.0, 0.0, 1.0]),
    ]
    for A in invariants:
        x = rng.uniform(-2, 2, 3)
        assert np.abs(mbky_residual(A, v, x).values).max() <= 1e-6
    for W in (wedge(*invariants[:2]), wedge(*invariants)):
        for x in rng.uniform(-2, 2, (10, 3)):
            assert np.abs(mbky_residual(W, v, x).values).max() <= 1e-6
    # a non-invariant factor spoils it
    W = wedge(invariants[0], const([1.0, 0.0, 0.0]))
    assert np.abs(mbky_residual(W, v, [0.5, 0.2, 0.1]).values).max() > 1e-3


# -- Faddeev-Jackiw ----------------------------------------------------------------


def test_fj_bracket_first_order_variables(rng):
    n = 3
    f = costate.first_order_one_form(n)
    eps = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    for y in rng.uniform(-2, 2, (5, 2 * n)):
        assert np.abs(fj_bracket(f, y) - eps).max() <= 1e-9


def test_fj_bracket_two_dimensional():
    f = OneForm(2, lambda x: np.array([0.0, x[0]]))
    np.testing.assert_allclose(costate.structure_matrix(f, [0.3, 0.1]), [[0, 1], [-1, 0]], atol=1e-10)
    np.testing.assert_allclose(fj_bracket(f, [0.3, 0.1]), [[0, -1], [1, 0]], atol=1e-10)


def test_fj_closed_form_is_singular():
    f = OneForm(2, lambda x: np.array([2 * x[0] * x[1], x[0] ** 2]))  # gradient of x0^2 x1
    with pytest.raises(SingularStructureError):
        fj_bracket(f, [0.5, 0.5])


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fj_bracket_is_antisymmetric_inverse(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4))
    f = OneForm(4, lambda x: a @ x + 0.1 * b @ (x**2))
    x = rng.uniform(-1, 1, 4)
    fm = costate.structure_matrix(f, x)
    if abs(np.linalg.det(fm)) < 1e-3:
        return
    P = fj_bracket(f, x)
    assert np.abs(P + P.T).max() <= 1e-9 * max(1.0, np.abs(P).max())
    assert np.abs(P @ fm - np.eye(4)).max() <= 1e-9


def test_fj_flow_examples():
    f = OneForm(2, lambda x: np.array([0.0, x[0]]))
    x = np.array([0.6, -0.8])
    np.testing.assert_allclose(fj_flow(f, lambda z: 0.5 * z @ z, x), [0.8, 0.6], atol=1e-9)
    np.testing.assert_allclose(fj_flow(f, lambda z: 4.0, x), [0.0, 0.0], atol=1e-12)


def test_fj_flow_reproduces_extension(rng):
    for v in (vortex.vortex_field([1.0, 2.0]), vortex.reduced_field([1.0, -2.0, 0.5])):
        n = v.dim
        f = costate.first_order_one_form(n)
        H = costate.first_order_hamiltonian(v)
        ext = extend(v)
        for _ in range(20):
            x = rng.uniform(-1, 1, n)
            if n == 4:
                x = 0.2 * x + [1, 0, -1, 0]
            y = np.r_[x, rng.uniform(-1, 1, n)]
            assert np.abs(fj_flow(f, H, y) - ext(y)).max() <= 1e-6
