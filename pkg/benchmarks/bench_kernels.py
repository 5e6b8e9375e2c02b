"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-repeat wall time per call for each kernel and backend, and
the speedup. Also times a full 3-vortex rk4 run (10^4 steps) through the
public API with each backend swapped in.
"""

import argparse
import timeit

import numpy as np

from npdyn import _fallback, flows, nambu, vortex

try:
    from npdyn import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_velocity(mod, n, repeat):
    rng = np.random.default_rng(0)
    xy = rng.uniform(-10, 10, 2 * n)
    g = rng.uniform(0.5, 1.5, n)
    out = np.empty(2 * n)
    number = max(1, 20000 // (n * n))
    return best(lambda: mod.vortex_velocity(xy, g, 1e-18, out), repeat, number)


def bench_contract(mod, dim, p, repeat):
    rng = np.random.default_rng(1)
    grads = rng.normal(size=(p, dim))
    rows, signs = nambu.levi_civita_table(dim, p)
    out = np.empty(dim)
    return best(lambda: mod.levi_civita_contract(grads, rows, signs, out), repeat, 200)


def bench_integration(mod, repeat):
    saved = vortex.kernels
    vortex.kernels = mod
    try:
        v = vortex.vortex_field([1.0, 0.7, 1.3])
        x0 = vortex.to_interleaved([0.0, 1.0, 0.4 + 0.9j])
        cfg = flows.IntegratorConfig("rk4", 1e-3, 10.0, record_every=100)
        return best(lambda: flows.integrate(v, x0, cfg), repeat, 1)
    finally:
        vortex.kernels = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled kernels not built; nothing to compare")
        return
    rows = []
    for n in (3, 10, 100, 400):
        rows.append((f"vortex_velocity N={n}", *(bench_velocity(m, n, args.repeat) for m in (_kernels, _fallback))))
    for dim, p in ((3, 2), (5, 3), (7, 4)):
        rows.append(
            (f"levi_civita_contract N={dim} p={p}", *(bench_contract(m, dim, p, args.repeat) for m in (_kernels, _fallback)))
        )
    rows.append(("3-vortex rk4, 10^4 steps", *(bench_integration(m, max(1, args.repeat // 2)) for m in (_kernels, _fallback))))
    print(f"{'kernel':36s} {'cython':>12s} {'python':>12s} {'speedup':>8s}")
    for name, tc, tp in rows:
        print(f"{name:36s} {tc * 1e6:10.2f}us {tp * 1e6:10.2f}us {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
