"""Scaled local energies, concentration detection and Vitali covers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import lattice as lt
from ..errors import ConfigurationError, DomainError
from ..fields import ConnectionField, SpinorField, covariant_diff_values
from ..flow import FlowState
from ..functional import ModelParams, energy_density
from ..lattice import Lattice

# ball membership |x - x0| <= R is decided with this relative slack so that
# sites at exactly representable lattice distances are not lost to rounding
BALL_RTOL = 1e-9


def detector_density(phi: SpinorField, a: ConnectionField) -> np.ndarray:
    """Per-site ``|D phi|^2 + |f|^2`` (full curvature, no 1/2)."""
    lat = phi.lattice
    D = covariant_diff_values(lat, phi.values, a.values)
    f = lt.d_link_to_plaq(lat, a.values)
    return np.sum(D.real**2 + D.imag**2, axis=(0, -1)) + np.sum(f**2, axis=0)


def _density_for(mode: str, phi, a, params: ModelParams) -> np.ndarray:
    if mode == "detector":
        return detector_density(phi, a)
    if mode == "sw":
        return energy_density(phi, a, params)
    raise ConfigurationError(f"unknown local energy mode {mode!r}", key="mode")


def _check_radius(lat: Lattice, R: float):
    if not 0 < R <= lat.L / 2 * (1 + 1e-12):
        raise DomainError(f"radius {R!r} outside (0, L/2]")


def _weight(lat: Lattice, R: float, mode: str) -> float:
    return R ** (4 - lat.m) if mode == "detector" else 1.0


def local_energy(
    phi: SpinorField,
    a: ConnectionField,
    x0,
    R: float,
    mode: str = "detector",
    params: ModelParams | None = None,
) -> float:
    """Ball energy around ``x0``.

    ``detector``: ``R^(4-m) h^m sum_{B_R(x0)} (|D phi|^2 + |f|^2)``;
    ``sw``: ``h^m sum_{B_R(x0)} e(phi, a)`` without the radius weight.
    """
    lat = phi.lattice
    _check_radius(lat, R)
    if params is None:
        if mode == "sw":
            raise ConfigurationError("sw mode needs model parameters", key="s_const")
    dens = _density_for(mode, phi, a, params)
    inside = lt.site_distances(lat, x0) <= R * (1 + BALL_RTOL)
    return _weight(lat, R, mode) * lat.cell_volume * float(np.sum(dens[inside]))


def ball_kernel(lat: Lattice, R: float) -> np.ndarray:
    """Indicator of nearest-image offsets within ``R`` of the origin."""
    return lt.site_distances(lat, np.zeros(lat.m)) <= R * (1 + BALL_RTOL)


def ball_sums(lat: Lattice, density: np.ndarray, R: float) -> np.ndarray:
    """``sum_{y in B_R(x)} density(y)`` for every site ``x`` (circular convolution)."""
    kernel = ball_kernel(lat, R).astype(float)
    spec = np.fft.rfftn(density) * np.fft.rfftn(kernel)
    return np.fft.irfftn(spec, s=lat.shape, axes=tuple(range(lat.m)))


def local_energy_map(
    phi: SpinorField,
    a: ConnectionField,
    R: float,
    mode: str = "detector",
    params: ModelParams | None = None,
) -> np.ndarray:
    lat = phi.lattice
    _check_radius(lat, R)
    dens = _density_for(mode, phi, a, params)
    return _weight(lat, R, mode) * lat.cell_volume * ball_sums(lat, dens, R)


@dataclass(frozen=True)
class DetectorConfig:
    delta: float = 0.05
    radii: tuple[float, ...] | None = None
    R1: float | None = None

    def resolve(self, lat: Lattice) -> tuple[float, ...]:
        """Radii sorted in decreasing order, defaulting to L/4, L/8, L/16."""
        if not self.delta > 0:
            raise ConfigurationError("delta must be positive", key="delta")
        radii = self.radii if self.radii is not None else (lat.L / 4, lat.L / 8, lat.L / 16)
        if len(radii) == 0:
            raise ConfigurationError("radius grid is empty", key="radii")
        cap = lat.injectivity_radius if self.R1 is None else min(self.R1, lat.injectivity_radius)
        for r in radii:
            if not 0 < r <= cap * (1 + 1e-12):
                raise ConfigurationError(f"radius {r!r} outside (0, {cap!r}]", key="radii")
        return tuple(sorted((float(r) for r in radii), reverse=True))


@dataclass(frozen=True, eq=False)
class Detection:
    sites: np.ndarray  # (F, m) integer multi-indices, lexicographic order
    energies: dict = field(repr=False)  # radius -> per-site local energy map
    radii: tuple[float, ...]
    delta: float

    def __len__(self):
        return len(self.sites)


def detect_singular_set(
    snapshot: FlowState, config: DetectorConfig, params: ModelParams | None = None
) -> Detection:
    """Flag sites whose detector energy reaches ``delta`` at every radius of the grid."""
    lat = snapshot.lattice
    radii = config.resolve(lat)
    energies = {}
    flagged = np.ones(lat.shape, dtype=bool)
    for R in radii:
        emap = local_energy_map(snapshot.phi, snapshot.a, R, "detector", params)
        energies[R] = emap
        flagged &= emap >= config.delta
    sites = np.argwhere(flagged)
    return Detection(sites=sites, energies=energies, radii=radii, delta=config.delta)


@dataclass(frozen=True)
class DetectorReport:
    flagged: tuple[tuple[int, ...], ...]
    centers: tuple[tuple[int, ...], ...]
    R: float
    hausdorff_sum: float
    energy_bound: float | None = None


def torus_distance(lat: Lattice, p, q) -> float:
    off = lt.nearest_image(np.asarray(p, float) * lat.h, np.asarray(q, float) * lat.h, lat.L)
    return float(np.sqrt(np.sum(off**2)))


def vitali_cover(
    lat: Lattice,
    sites: Sequence[Sequence[int]],
    R: float,
    weights: Sequence[float] | None = None,
    sw0: float | None = None,
    delta: float | None = None,
) -> DetectorReport:
    """Greedy selection of pairwise disjoint closed ``R``-balls.

    Candidates are visited by decreasing ``weights`` (input order when not
    given); a site becomes a center when it is farther than ``2R`` from every
    chosen center. Every flagged site then lies within ``2R <= 5R`` of a
    center. ``energy_bound`` is ``5^m SW0 / delta`` when both are given.
    """
    if not R > 0:
        raise DomainError(f"cover radius must be positive, got {R!r}")
    sites = [tuple(int(v) for v in s) for s in sites]
    order = range(len(sites))
    if weights is not None:
        order = sorted(order, key=lambda i: -float(weights[i]))
    centers: list[tuple[int, ...]] = []
    for i in order:
        if all(torus_distance(lat, sites[i], c) > 2 * R for c in centers):
            centers.append(sites[i])
    bound = None
    if sw0 is not None and delta:
        bound = 5.0**lat.m * sw0 / delta
    return DetectorReport(
        flagged=tuple(sites),
        centers=tuple(centers),
        R=float(R),
        hausdorff_sum=len(centers) * (5.0 * R) ** (lat.m - 4),
        energy_bound=bound,
    )


def cover_is_valid(lat: Lattice, report: DetectorReport) -> bool:
    """Exact check of disjointness and 5R coverage."""
    disjoint = all(
        torus_distance(lat, p, q) > 2 * report.R
        for p, q in itertools.combinations(report.centers, 2)
    )
    covered = all(
        any(torus_distance(lat, s, c) <= 5 * report.R for c in report.centers)
        for s in report.flagged
    )
    return disjoint and covered
