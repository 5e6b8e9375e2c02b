"""Pure numpy implementations of the kernels in ``_kernels.pyx``."""

import numpy as np


def _pairs(xy, eps2):
    n = xy.shape[0] // 2
    x = xy[0::2]
    y = xy[1::2]
    a = x[:, None] - x[None, :]
    b = y[:, None] - y[None, :]
    r2 = a * a + b * b
    iu = np.triu_indices(n, k=1)
    close = np.nonzero(r2[iu] < eps2)[0]
    code = -1
    if close.size:
        k = close[0]
        code = int(iu[0][k] * n + iu[1][k])
    np.fill_diagonal(r2, 1.0)
    return a, b, r2, code


def vortex_velocity(xy, gammas, eps2, out):
    a, b, r2, code = _pairs(xy, eps2)
    if code >= 0:
        return code
    out[0::2] = -(b / r2) @ gammas
    out[1::2] = (a / r2) @ gammas
    return -1


def vortex_jacobian(xy, gammas, eps2, out):
    a, b, r2, code = _pairs(xy, eps2)
    if code >= 0:
        return code
    r4 = r2 * r2
    s = 2.0 * a * b / r4 * gammas[None, :]
    c = (a * a - b * b) / r4 * gammas[None, :]
    np.fill_diagonal(s, 0.0)
    np.fill_diagonal(c, 0.0)
    out[:] = 0.0
    out[0::2, 0::2] = -s
    out[0::2, 1::2] = c
    out[1::2, 0::2] = c
    out[1::2, 1::2] = s
    idx = np.arange(gammas.shape[0])
    out[2 * idx, 2 * idx] = s.sum(axis=1)
    out[2 * idx, 2 * idx + 1] = -c.sum(axis=1)
    out[2 * idx + 1, 2 * idx] = -c.sum(axis=1)
    out[2 * idx + 1, 2 * idx + 1] = -s.sum(axis=1)
    return -1


def vortex_energy(xy, gammas, eps2):
    _, _, r2, code = _pairs(xy, eps2)
    if code >= 0:
        return 0.0, code
    n = gammas.shape[0]
    iu = np.triu_indices(n, k=1)
    return float(np.sum(gammas[iu[0]] * gammas[iu[1]] * np.log(r2[iu]))), -1


def levi_civita_contract(grads, perms, signs, out):
    p = grads.shape[0]
    terms = signs * np.prod(grads[np.arange(p), perms[:, 1:]], axis=1)
    out[:] = np.bincount(perms[:, 0], weights=terms, minlength=out.shape[0])
