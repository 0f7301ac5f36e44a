"""Heat-kernel weighted monotonicity quantities and empirical constant fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import lattice as lt
from ..errors import DomainError, PreconditionError
from ..fields import covariant_diff_values
from ..flow import FlowHistory
from ..functional import ModelParams, energy_density, rhs_values
from ..lattice import Lattice

_TIME_TOL = 1e-12


def cutoff_value(r, L: float):
    """Smooth radial cutoff: 1 on ``r <= L/4``, 0 on ``r >= L/2``.

    The transition is the quintic smoothstep, so the profile is C^2 and
    monotone with slope bounded by ``15/(2 L)``.
    """
    r = np.asarray(r, dtype=float)
    u = np.clip((r - L / 4) / (L / 4), 0.0, 1.0)
    out = 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u**2)
    return float(out) if out.ndim == 0 else out


def heat_kernel_r2(r2, tau: float, m: int):
    if not tau > 0:
        raise DomainError(f"heat kernel needs tau > 0, got {tau!r}")
    return (4 * math.pi * tau) ** (-m / 2) * np.exp(-np.asarray(r2) / (4 * tau))


def heat_kernel(offset, tau: float, m: int | None = None):
    """Backward heat kernel ``(4 pi tau)^(-m/2) exp(-|offset|^2 / 4 tau)``.

    ``offset`` carries coordinates on its last axis; pass nearest-image
    offsets for points on the torus.
    """
    offset = np.asarray(offset, dtype=float)
    m = offset.shape[-1] if m is None else m
    out = heat_kernel_r2(np.sum(offset**2, axis=-1), tau, m)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Probe:
    x0: tuple[float, ...]
    t0: float
    R: float

    def validate(self, lat: Lattice):
        if len(self.x0) != lat.m:
            raise PreconditionError(f"x0 needs {lat.m} coordinates")
        cap = min(lat.injectivity_radius, math.sqrt(max(self.t0, 0.0)) / 2)
        if not 0 < self.R <= cap * (1 + 1e-12):
            raise PreconditionError(
                f"R={self.R!r} outside (0, min(i(M), sqrt(t0)/2)] = (0, {cap!r}]"
            )

    @property
    def slab(self) -> tuple[float, float]:
        return self.t0 - 4 * self.R**2, self.t0 - self.R**2


def _slab_indices(times: np.ndarray, lo: float, hi: float, t0: float) -> np.ndarray:
    tol = _TIME_TOL * max(1.0, abs(t0))
    if times[0] > lo + tol or times[-1] < hi - tol:
        raise PreconditionError(
            f"history [{times[0]!r}, {times[-1]!r}] does not cover slab [{lo!r}, {hi!r}]"
        )
    first = int(np.searchsorted(times, lo + tol, side="right")) - 1
    last = int(np.searchsorted(times, hi - tol, side="left"))
    idx = np.arange(first, last + 1)
    if len(idx) < 3:
        raise PreconditionError(f"slab [{lo!r}, {hi!r}] spans only {len(idx)} snapshots (need 3)")
    if times[idx[-1]] >= t0:
        raise PreconditionError("slab bracket reaches t0; store snapshots closer to t0 - R^2")
    return idx


def _integrate_clipped(times: np.ndarray, values: np.ndarray, lo: float, hi: float) -> float:
    """Integral over ``[lo, hi]`` of the piecewise-linear interpolant."""
    inner = (times > lo) & (times < hi)
    ts = np.concatenate([[lo], times[inner], [hi]])
    vs = np.concatenate([[np.interp(lo, times, values)], values[inner], [np.interp(hi, times, values)]])
    return float(np.sum(0.5 * (vs[1:] + vs[:-1]) * np.diff(ts)))


def _spatial_integrands(state, params: ModelParams, probe: Probe, t: float):
    lat = params.lattice
    offsets = lt.site_offsets(lat, probe.x0)
    r2 = np.sum(offsets**2, axis=0)
    tau = probe.t0 - t
    weight = cutoff_value(np.sqrt(r2), lat.L) ** 2 * heat_kernel_r2(r2, tau, lat.m)

    e = energy_density(state.phi, state.a, params)
    phi_term = probe.R**2 * lat.cell_volume * float(np.sum(e * weight))

    phi, a = state.phi.values, state.a.values
    psi, b = rhs_values(lat, phi, a, params.S)
    D = covariant_diff_values(lat, phi, a)
    F = lt.antisymmetric(lat, lt.d_link_to_plaq(lat, a))
    s = t - probe.t0  # negative on the slab
    contracted = np.einsum("k...,kj...->j...", offsets, F)
    link_part = np.sum((b + contracted / (2 * s)) ** 2, axis=0)
    spin = psi + np.einsum("k...,k...c->...c", offsets, D) / (2 * s)
    spin_part = np.sum(spin.real**2 + spin.imag**2, axis=-1)
    f_term = probe.R * tau * lat.cell_volume * float(
        np.sum((link_part + 2.0 * spin_part) * weight)
    )
    return phi_term, f_term


def monotonicity_quantities(
    history: FlowHistory, probe: Probe, params: ModelParams | None = None
) -> tuple[float, float]:
    """Return ``(Phi, F)`` for the slab ``[t0 - 4R^2, t0 - R^2]``.

    Spatial integrals use cell weight ``h^m`` with the heat kernel and the
    squared cutoff evaluated at base sites and nearest-image offsets. The
    time integral is the trapezoid rule on the stored snapshots, with the
    integrand linearly interpolated at slab endpoints that fall between
    snapshots. ``F`` uses ``tau = t0 - t > 0`` in place of the signed
    prefactor, so ``F >= 0``.
    """
    params = params or history.params
    lat = params.lattice
    probe.validate(lat)
    times = history.times
    lo, hi = probe.slab
    idx = _slab_indices(times, lo, hi, probe.t0)
    phis, fs = [], []
    for i in idx:
        p, f = _spatial_integrands(history[i], params, probe, times[i])
        phis.append(p)
        fs.append(f)
    ts = times[idx]
    return (
        _integrate_clipped(ts, np.array(phis), lo, hi),
        _integrate_clipped(ts, np.array(fs), lo, hi),
    )


@dataclass(frozen=True)
class MonotonicityTable:
    rows: tuple[tuple[float, float, float], ...]
    fitted_a: float | None
    fitted_c: float | None
    sw0: float

    @property
    def attainable(self) -> bool:
        return self.fitted_a is not None


DEFAULT_A_GRID = (0.0,) + tuple(float(v) for v in np.logspace(-3, 3, 61))


def fit_monotonicity_constants(
    radii: Sequence[float], phis: Sequence[float], sw0: float, a_grid=DEFAULT_A_GRID
) -> tuple[float | None, float | None]:
    """Smallest ``(a, c)`` making ``exp(a R) Phi(R) + c R^2 SW0`` non-decreasing.

    For each ``a`` on the grid the least admissible ``c >= 0`` is solved in
    closed form; the pair with the smallest ``a + c`` wins (ties go to the
    smaller ``a``). Returns ``(None, None)`` when no grid point works.
    """
    radii = np.asarray(radii, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if len(radii) < 2:
        return 0.0, 0.0
    d_r2 = np.diff(radii**2)
    best = None
    for a in a_grid:
        v = np.exp(a * radii) * phis
        dv = np.diff(v)
        slack = 1e-14 * max(1.0, float(np.max(np.abs(v))))
        deficit = -dv[dv < -slack]
        if deficit.size == 0:
            c = 0.0
        elif sw0 > 0:
            c = float(np.max(-dv / (d_r2 * sw0)))
        else:
            continue
        if best is None or a + c < best[0] + best[1]:
            best = (float(a), c)
    return best if best is not None else (None, None)


def monotonicity_scan(
    history: FlowHistory,
    x0,
    t0: float,
    radii: Sequence[float],
    params: ModelParams | None = None,
    a_grid=DEFAULT_A_GRID,
) -> MonotonicityTable:
    params = params or history.params
    lat = params.lattice
    radii = sorted(float(r) for r in radii)
    probes = [Probe(tuple(float(v) for v in x0), float(t0), r) for r in radii]
    for p in probes:
        p.validate(lat)
    rows = []
    for p in probes:
        phi_val, f_val = monotonicity_quantities(history, p, params)
        rows.append((p.R, phi_val, f_val))
    first = history[0]
    sw0 = float(lat.cell_volume * np.sum(energy_density(first.phi, first.a, params)))
    a, c = fit_monotonicity_constants(radii, [r[1] for r in rows], sw0, a_grid)
    return MonotonicityTable(rows=tuple(rows), fitted_a=a, fitted_c=c, sw0=sw0)
