"""Fused per-site kernels for the flow velocity and energy density.

Fields are passed flattened: spinors as ``(sites, N)``, links as
``(m, sites)``, with neighbor tables ``fwd[k, s]`` / ``bwd[k, s]`` giving the
flat index of ``s +/- e_k``. Loops run serially in a fixed order so results
do not depend on thread count.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit


@lru_cache(maxsize=16)
def neighbor_tables(m: int, n: int):
    idx = np.arange(n**m).reshape((n,) * m)
    fwd = np.stack([np.roll(idx, -1, axis=k).ravel() for k in range(m)])
    bwd = np.stack([np.roll(idx, 1, axis=k).ravel() for k in range(m)])
    pj = np.array([j for j in range(m) for k in range(j + 1, m)], dtype=np.int64)
    pk = np.array([k for j in range(m) for k in range(j + 1, m)], dtype=np.int64)
    for arr in (fwd, bwd, pj, pk):
        arr.setflags(write=False)
    return fwd, bwd, pj, pk


@njit(cache=True)
def _phases(a, h):
    m, ns = a.shape
    U = np.empty((m, ns), np.complex128)
    for k in range(m):
        for s in range(ns):
            th = 0.5 * h * a[k, s]
            U[k, s] = complex(np.cos(th), np.sin(th))
    return U


@njit(cache=True)
def _curvature(a, fwd, pj, pk, inv_h):
    P = pj.shape[0]
    ns = a.shape[1]
    f = np.empty((P, ns))
    for p in range(P):
        j = pj[p]
        k = pk[p]
        for s in range(ns):
            f[p, s] = (a[k, fwd[j, s]] - a[k, s] - a[j, fwd[k, s]] + a[j, s]) * inv_h
    return f


@njit(cache=True)
def rhs_kernel(phi, a, fwd, bwd, pj, pk, h, S):
    m, ns = a.shape
    N = phi.shape[1]
    inv_h = 1.0 / h
    # acc[s] accumulates sum_k conj(U_k(s - e_k)) D_k(s - e_k) - D_k(s)
    acc = np.zeros((ns, N), np.complex128)
    b = np.empty((m, ns))
    for s in range(ns):
        for k in range(m):
            t = fwd[k, s]
            th = 0.5 * h * a[k, s]
            ur = np.cos(th)
            ui = np.sin(th)
            cur = 0.0
            for c in range(N):
                pr = phi[t, c].real
                pi = phi[t, c].imag
                sr = phi[s, c].real
                si = phi[s, c].imag
                dr = (ur * pr - ui * pi - sr) * inv_h
                di = (ur * pi + ui * pr - si) * inv_h
                cur += di * sr - dr * si
                acc[s, c] -= complex(dr, di)
                acc[t, c] += complex(ur * dr + ui * di, ur * di - ui * dr)
            b[k, s] = -cur

    psi = np.empty((ns, N), np.complex128)
    for s in range(ns):
        rho = 0.0
        for c in range(N):
            rho += phi[s, c].real ** 2 + phi[s, c].imag ** 2
        coef = 0.25 * (S + rho)
        for c in range(N):
            psi[s, c] = -acc[s, c] * inv_h - coef * phi[s, c]

    f = _curvature(a, fwd, pj, pk, inv_h)
    for p in range(pj.shape[0]):
        j = pj[p]
        k = pk[p]
        for s in range(ns):
            b[k, s] -= (f[p, bwd[j, s]] - f[p, s]) * inv_h
            b[j, s] += (f[p, bwd[k, s]] - f[p, s]) * inv_h
    return psi, b


@njit(cache=True)
def density_kernel(phi, a, fwd, pj, pk, h, S):
    m, ns = a.shape
    N = phi.shape[1]
    inv_h = 1.0 / h
    U = _phases(a, h)
    out = np.empty(ns)
    for s in range(ns):
        rho = 0.0
        for c in range(N):
            rho += phi[s, c].real ** 2 + phi[s, c].imag ** 2
        grad = 0.0
        for k in range(m):
            t = fwd[k, s]
            u = U[k, s]
            for c in range(N):
                d = (u * phi[t, c] - phi[s, c]) * inv_h
                grad += d.real ** 2 + d.imag ** 2
        out[s] = grad + 0.25 * S * rho + 0.125 * rho * rho
    f = _curvature(a, fwd, pj, pk, inv_h)
    for p in range(pj.shape[0]):
        for s in range(ns):
            out[s] += 0.5 * f[p, s] ** 2
    return out
