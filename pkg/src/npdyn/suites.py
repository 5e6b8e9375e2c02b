"""Built-in property suites run by ``npdyn check``.

Each check returns ``(label, passed, detail)``. Everything is seeded and
runs in a few seconds at most.
"""

import math
from fractions import Fraction

import numpy as np

from . import costate, discrete, flows, nambu, qmcheck, vortex
from .flows import IntegratorConfig, integrate

SEED = 20240917


def _rng():
    return np.random.default_rng(SEED)


def _result(label, value, limit, ok=None):
    ok = value <= limit if ok is None else ok
    return label, bool(ok), f"{value:.3e} (limit {limit:g})"


def check_flows():
    out = []
    rot = flows.rotation_field()
    errs = []
    for dt in (0.1, 0.05):
        final = integrate(rot, [1.0, 0.0], IntegratorConfig("rk4", dt, math.pi)).final
        errs.append(float(np.max(np.abs(final - [-1.0, 0.0]))))
    order = math.log2(errs[0] / errs[1])
    out.append(("rk4 order on rotation", 3.7 <= order <= 4.3, f"{order:.3f} in [3.7, 4.3]"))
    rng = _rng()
    a = rng.normal(size=(3, 3))
    lin = flows.linear_field(a)
    err = max(np.abs(flows.jacobian_fd(lin, x) - a).max() for x in rng.uniform(-2, 2, (5, 3)))
    out.append(_result("fd jacobian exact on affine field", err, 1e-9))
    vf = vortex.vortex_field([1.0, -0.5, 2.0])
    worst = 0.0
    for _ in range(20):
        x = np.array([0, 0, 1.5, 0, 0, 1.5]) + rng.uniform(-0.3, 0.3, 6)
        ja, jf = vf.jacobian(x), flows.jacobian_fd(vf, x)
        worst = max(worst, np.abs(ja - jf).max() / np.abs(ja).max())
    out.append(_result("analytic vs fd jacobian (3 vortices)", worst, 1e-6))
    return out


def check_costate():
    out = []
    cfg = IntegratorConfig("rk4", 1e-3, 10.0)
    rng = _rng()
    for name, v, x0 in (
        ("rotation", flows.rotation_field(), [1.0, 0.5]),
        ("2-vortex", vortex.vortex_field([1.0, 1.0]), [1.0, 0.0, -1.0, 0.0]),
    ):
        n = v.dim
        y0 = np.concatenate([x0, rng.uniform(-1, 1, n)])
        tr = integrate(costate.extend(v), y0, cfg, {"H1": costate.h1_monitor(v)})
        out.append(_result(f"H1 conservation ({name})", tr.drift("H1")[2], 1e-7))
    rot = flows.rotation_field()
    worst = 0.0
    for x in rng.uniform(-2, 2, (20, 2)):
        res = costate.mbky_residual(costate.AntisymmetricTensorField.from_vector_field(rot), rot, x)
        worst = max(worst, np.abs(res.values).max())
    out.append(_result("MBKY residual of A = v", worst, 1e-6))
    v3 = flows.VectorField(3, lambda x: np.array([x[1], -x[0], 0.0]), name="z-rotation")
    A1 = costate.AntisymmetricTensorField.from_vector_field(v3)
    A2 = costate.AntisymmetricTensorField.from_function(3, lambda x: np.array(x, dtype=float))
    W = costate.wedge(A1, A2)
    worst = max(np.abs(costate.mbky_residual(W, v3, x).values).max() for x in rng.uniform(-2, 2, (10, 3)))
    out.append(_result("MBKY residual of wedge of invariants", worst, 1e-6))
    vf = vortex.vortex_field([1.0, 2.0])
    f = costate.first_order_one_form(vf.dim)
    H = costate.first_order_hamiltonian(vf)
    ext = costate.extend(vf)
    worst = 0.0
    for _ in range(20):
        y = np.concatenate([[1, 0, -1, 0] + rng.uniform(-0.2, 0.2, 4), rng.uniform(-1, 1, 4)])
        worst = max(worst, np.abs(costate.fj_flow(f, H, y) - ext(y)).max())
    out.append(_result("Faddeev-Jackiw flow equals extend(v)", worst, 1e-6))
    return out


def check_nambu():
    out = []
    rng = _rng()
    g = np.array([1.0, 2.0, 3.0])
    sys = vortex.reduced_nambu_system(g, analytic=False)
    worst = max(
        np.abs(nambu.nambu_flow(sys, u) - vortex.reduced_rhs(vortex.ReducedState(u, g))).max()
        for u in rng.uniform(-1, 1, (100, 3))
    )
    out.append(_result("Nambu form equals reduced 3-vortex field", worst, 1e-8))
    worst = 0.0
    for p, N in ((1, 3), (2, 3), (2, 4), (3, 4), (3, 5), (1, 5), (2, 5), (1, 4), (3, 5), (2, 4)):
        s = nambu.random_polynomial_system(N, p, rng)
        worst = max(worst, abs(flows.divergence_fd(s.as_field(), rng.uniform(-1, 1, N))))
    out.append(_result("divergence of random Nambu flows", worst, 1e-6))
    drifts = nambu.hamiltonian_drift(nambu.euler_top(), [1.0, 0.5, -0.3], IntegratorConfig("rk4", 1e-3, 5.0))
    out.append(_result("Euler top Casimir drift", max(drifts.values()), 1e-7))
    return out


def check_vortex():
    out = []
    g = [1.0, 2.0, 3.0]
    tr = integrate(
        vortex.reduced_field(g), [0.1, -0.2, 0.3], IntegratorConfig("rk4", 1e-3, 10.0), vortex.reduced_monitors(g)
    )
    out.append(_result("reduced H1 drift", tr.drift("H1")[2], 1e-7))
    out.append(_result("reduced H2 drift", tr.drift("H2")[2], 1e-7))
    gam = np.array([1.0, 0.7, 1.3])
    z = np.array([0.0, 1.0, 0.4 + 0.9j])
    tr = integrate(
        vortex.vortex_field(gam),
        vortex.to_interleaved(z),
        IntegratorConfig("rk4", 1e-3, 5.0),
        {"H": vortex.hamiltonian_monitor(gam)},
    )
    out.append(_result("full 3-vortex Hamiltonian drift", tr.drift("H")[2], 1e-6))
    P = [vortex.impulse(gam, s) for s in tr.states]
    out.append(_result("linear impulse drift", max(abs(p - P[0]) for p in P), 1e-8))
    return out


def check_discrete():
    out = []
    cat = discrete.cat_map()
    S0 = np.array([Fraction(1, 3), Fraction(2, 7)], dtype=object)
    ps = discrete.pairing_series(
        cat, S0, np.array([1, 2], dtype=object), np.array([3, -1], dtype=object), 100, "pre_step"
    )
    out.append(("cat map pairing exact over 100 steps", len(set(ps)) == 1, f"distinct values: {len(set(ps))}"))
    ps = discrete.pairing_series(
        discrete.shear_map(), np.array([0.3, 0.7]), np.array([1.0, 2.0]), np.array([0.5, -1.0]), 100, "pre_step"
    )
    rel = max(abs(p - ps[0]) for p in ps) / abs(ps[0])
    out.append(_result("shear map pairing", rel, 1e-6))
    rep = discrete.reversibility(discrete.fanout_map(), np.array([0.2, 0.9]))
    out.append(("fan-out irreversible with det 0", (not rep.reversible) and rep.det == 0.0, f"det={rep.det}"))
    rep = discrete.coherence_check(flows.rotation_field(), np.array([0.3, -0.4]))
    out.append(("coherence residual order (rotation)", 1.8 <= rep.slope <= 2.2, f"slope {rep.slope:.3f}"))
    rep = discrete.coherence_check(vortex.reduced_field([1.0, 2.0, 3.0]), np.array([0.1, -0.2, 0.3]))
    out.append(_result("coherence first-order term (Nambu flow)", rep.first_order, 1e-6))
    return out


def check_qmcheck():
    out = []
    for d in (1, 2, 3, 5, 6):
        order = qmcheck.convergence_order(qmcheck.RadialGrid(1.0, 2.0, 201, d))
        out.append((f"conformal potential order d={d}", abs(order - 2.0) <= 0.3, f"{order:.3f}"))
    res = qmcheck.stationarity_residual(qmcheck.RadialGrid(1.0, 2.0, 201, 4))
    out.append(("conformal potential d=4 residual", res == 0.0, f"{res}"))
    return out


SUITES = {
    "flows": check_flows,
    "costate": check_costate,
    "nambu": check_nambu,
    "vortex": check_vortex,
    "discrete": check_discrete,
    "qmcheck": check_qmcheck,
}


def run_suites(names):
    results = []
    for name in names:
        for label, ok, detail in SUITES[name]():
            results.append((name, label, ok, detail))
    return results
