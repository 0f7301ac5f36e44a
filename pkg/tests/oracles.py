"""Brute-force reference computations written directly from the definitions.

Everything here loops over sites in plain Python and shares no code with the
package beyond the lattice dataclass, so agreement with the vectorized and
compiled paths is a genuine cross-check.
"""

import cmath
import itertools
import math

import numpy as np


def sites(lat):
    return itertools.product(range(lat.n), repeat=lat.m)


def step_site(lat, x, k, d=1):
    y = list(x)
    y[k] = (y[k] + d) % lat.n
    return tuple(y)


def min_image_offset(lat, x, x0):
    """Offset of site ``x`` from point ``x0`` minimizing |.| over the 3^m images."""
    pos = [xi * lat.h for xi in x]
    best = None
    for shift in itertools.product((-1, 0, 1), repeat=lat.m):
        off = [p + lat.L * s - c for p, s, c in zip(pos, shift, x0)]
        r2 = sum(o * o for o in off)
        if best is None or r2 < best[0] - 1e-15:
            best = (r2, off)
    return best[1]


def link_diff(lat, phi, a, x, k):
    """Covariant forward difference at site ``x`` along ``k`` (list of N complex)."""
    u = cmath.exp(0.5j * lat.h * a[(k, *x)])
    y = step_site(lat, x, k)
    return [(u * phi[y][c] - phi[x][c]) / lat.h for c in range(phi.shape[-1])]


def plaquette(lat, a, x, j, k):
    xj, xk = step_site(lat, x, j), step_site(lat, x, k)
    return (a[(k, *xj)] - a[(k, *x)] - a[(j, *xk)] + a[(j, *x)]) / lat.h


def site_terms(lat, phi, a, x):
    """Return (sum_k |D_k phi|^2, sum_{j<k} f_jk^2, |phi|^2) at site ``x``."""
    grad = sum(abs(d) ** 2 for k in range(lat.m) for d in link_diff(lat, phi, a, x, k))
    curv = sum(plaquette(lat, a, x, j, k) ** 2 for j in range(lat.m) for k in range(j + 1, lat.m))
    rho = sum(abs(v) ** 2 for v in phi[x])
    return grad, curv, rho


def energy_density_at(lat, phi, a, S, x):
    grad, curv, rho = site_terms(lat, phi, a, x)
    return grad + 0.5 * curv + S / 4 * rho + rho * rho / 8


def cutoff(r, L):
    if r <= L / 4:
        return 1.0
    if r >= L / 2:
        return 0.0
    u = (r - L / 4) / (L / 4)
    return 1.0 - (10 * u**3 - 15 * u**4 + 6 * u**5)


def gaussian(r2, tau, m):
    return (4 * math.pi * tau) ** (-m / 2) * math.exp(-r2 / (4 * tau))


def local_energy_loop(lat, phi, a, x0, R):
    total = 0.0
    for x in sites(lat):
        off = min_image_offset(lat, x, x0)
        if math.sqrt(sum(o * o for o in off)) <= R * (1 + 1e-9):
            grad, curv, _ = site_terms(lat, phi, a, x)
            total += grad + curv
    return R ** (4 - lat.m) * lat.h**lat.m * total


def trapezoid_on_slab(times, values, lo, hi):
    """Trapezoid rule for the piecewise-linear interpolant of (times, values) on [lo, hi]."""

    def interp(t):
        for i in range(len(times) - 1):
            if times[i] <= t <= times[i + 1]:
                w = (t - times[i]) / (times[i + 1] - times[i])
                return (1 - w) * values[i] + w * values[i + 1]
        raise ValueError("outside history")

    nodes = [lo] + [t for t in times if lo < t < hi] + [hi]
    vals = [interp(t) for t in nodes]
    return sum(0.5 * (vals[i] + vals[i + 1]) * (nodes[i + 1] - nodes[i]) for i in range(len(nodes) - 1))


def monotonicity_oracle(history, params, x0, t0, R, flow_rhs):
    """Naive (Phi, F) with velocities taken from ``flow_rhs``."""
    lat = params.lattice
    lo, hi = t0 - 4 * R * R, t0 - R * R
    times = [float(t) for t in history.times]
    offsets = {x: min_image_offset(lat, x, x0) for x in sites(lat)}
    phi_vals, f_vals = [], []
    used = []
    for i, t in enumerate(times):
        nxt = times[i + 1] if i + 1 < len(times) else None
        prv = times[i - 1] if i > 0 else None
        # keep every snapshot that brackets or lies inside the slab
        if (nxt is not None and nxt <= lo) or (prv is not None and prv >= hi):
            continue
        state = history[i]
        phi, a = state.phi.values, state.a.values
        psi, b = flow_rhs(state.phi, state.a, params)
        s = t - t0
        tau = t0 - t
        p_sum = f_sum = 0.0
        for x in sites(lat):
            off = offsets[x]
            r2 = sum(o * o for o in off)
            w = cutoff(math.sqrt(r2), lat.L) ** 2 * gaussian(r2, tau, lat.m)
            p_sum += energy_density_at(lat, phi, a, params.S, x) * w
            link = 0.0
            for j in range(lat.m):
                contr = 0.0
                for k in range(lat.m):
                    if k < j:
                        contr += off[k] * plaquette(lat, a, x, k, j)
                    elif k > j:
                        contr -= off[k] * plaquette(lat, a, x, j, k)
                link += (b[(j, *x)] + contr / (2 * s)) ** 2
            diffs = [link_diff(lat, phi, a, x, k) for k in range(lat.m)]
            spin = 0.0
            for c in range(phi.shape[-1]):
                v = psi[x][c] + sum(off[k] * diffs[k][c] for k in range(lat.m)) / (2 * s)
                spin += abs(v) ** 2
            f_sum += (link + 2 * spin) * w
        used.append(t)
        phi_vals.append(R * R * lat.h**lat.m * p_sum)
        f_vals.append(R * tau * lat.h**lat.m * f_sum)
    return trapezoid_on_slab(used, phi_vals, lo, hi), trapezoid_on_slab(used, f_vals, lo, hi)


def ball_profile_loop(lat, f, x0, r):
    total = 0.0
    for x in sites(lat):
        off = min_image_offset(lat, x, x0)
        if math.sqrt(sum(o * o for o in off)) <= r * (1 + 1e-9):
            total += float(np.sum(f[(slice(None), *x)] ** 2))
    return r ** (2 - lat.m) * lat.h**lat.m * total
