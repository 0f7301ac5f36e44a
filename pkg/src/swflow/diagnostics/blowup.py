"""Parabolic rescaling about a point and the curvature scaling profile."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .. import lattice as lt
from ..errors import DomainError
from ..fields import ConnectionField, SpinorField
from ..flow import FlowHistory
from ..functional import ModelParams, curvature
from ..lattice import Lattice
from .detector import BALL_RTOL


def rescale_blowup(
    history: FlowHistory, x_n: Sequence[int], t_n: float, k: int
) -> tuple[SpinorField, ConnectionField]:
    """Zoom by ``R_n = k h`` about site ``x_n`` at snapshot time ``t_n``.

    The rescaled lattice has spacing ``1/k`` and the same number of sites;
    the point ``j/k`` samples the original site ``x_n + j``. Values are
    ``phi_n = phi`` and ``a_n = R_n a``, which gives ``f_n = R_n^2 f`` and
    ``D_n phi_n = R_n D phi`` at the samples.
    """
    lat = history.params.lattice
    if not isinstance(k, (int, np.integer)) or k < 2 or lat.n % k:
        raise DomainError(f"ratio k={k!r} must be an integer >= 2 dividing n={lat.n}")
    times = history.times
    hits = np.flatnonzero(np.abs(times - t_n) <= 1e-12 * max(1.0, abs(t_n)))
    if hits.size == 0:
        raise DomainError(f"t_n={t_n!r} is not a snapshot time")
    state = history[int(hits[0])]
    if len(x_n) != lat.m:
        raise DomainError(f"site needs {lat.m} indices")

    R_n = k * lat.h
    shift = tuple(-int(v) for v in x_n)
    site_axes = tuple(range(lat.m))
    phi = np.roll(state.phi.values, shift, axis=site_axes)
    a = R_n * np.roll(state.a.values, shift, axis=tuple(ax + 1 for ax in site_axes))
    zoomed = Lattice(m=lat.m, n=lat.n, L=lat.n / k)
    return SpinorField(zoomed, phi), ConnectionField(zoomed, a)


def curvature_ball_profile(
    lat: Lattice, f: np.ndarray, x0, r_list: Sequence[float]
) -> list[tuple[float, float]]:
    """Rows ``(r, r^(2-m) h^m sum_{B_r(x0)} |f|^2)``."""
    dens = np.sum(f**2, axis=0)
    dist = lt.site_distances(lat, x0)
    rows = []
    for r in r_list:
        if not 0 < r <= lat.L / 2 * (1 + 1e-12):
            raise DomainError(f"profile radius {r!r} outside (0, L/2]")
        inside = dist <= r * (1 + BALL_RTOL)
        rows.append((float(r), r ** (2 - lat.m) * lat.cell_volume * float(np.sum(dens[inside]))))
    return rows


def curvature_scaling_profile(
    phi: SpinorField,
    a: ConnectionField,
    x0,
    r_list: Sequence[float],
    params: ModelParams | None = None,
) -> list[tuple[float, float]]:
    return curvature_ball_profile(a.lattice, curvature(a), x0, r_list)
