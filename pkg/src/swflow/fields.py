"""Spinor and connection fields, gauge action, covariant differences, initial data.

The connection is stored as its real carrier ``a`` (``A = i a``, ``A0 = 0``).
Spinor values have shape ``(*lattice.shape, N)``; connection values have
shape ``(m, *lattice.shape)``.

Random initial data uses ``numpy.random.Generator(PCG64(seed))`` so that a
given seed reproduces bit-identical fields on every platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import lattice as lt
from .errors import ConfigurationError, DomainError, ShapeError
from .lattice import Lattice


def _require_finite(values: np.ndarray, what: str):
    if not np.isfinite(values).all():
        raise DomainError(f"{what} values contain NaN or Inf")


@dataclass(frozen=True, eq=False)
class SpinorField:
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != self.lattice.m + 1 or self.values.shape[:-1] != self.lattice.shape:
            raise ShapeError(f"spinor values have shape {self.values.shape}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.complex128))
        _require_finite(self.values, "spinor")

    @property
    def N(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def zeros(cls, lat: Lattice, N: int) -> "SpinorField":
        return cls(lat, np.zeros(lat.shape + (N,), dtype=np.complex128))

    def modulus(self) -> np.ndarray:
        """Pointwise Euclidean norm of the fiber vector."""
        return np.sqrt(np.sum(np.abs(self.values) ** 2, axis=-1))


@dataclass(frozen=True, eq=False)
class ConnectionField:
    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.lattice.m,) + self.lattice.shape:
            raise ShapeError(f"connection values have shape {self.values.shape}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        _require_finite(self.values, "connection")

    @classmethod
    def zeros(cls, lat: Lattice) -> "ConnectionField":
        return cls(lat, np.zeros((lat.m,) + lat.shape))


def _same_lattice(*fields):
    lat = fields[0].lattice
    for f in fields[1:]:
        if f.lattice != lat:
            raise ShapeError("fields live on different lattices")
    return lat


def gauge_transform(
    phi: SpinorField, a: ConnectionField, chi: np.ndarray
) -> tuple[SpinorField, ConnectionField]:
    """Apply ``g = exp(i chi)``: ``phi -> exp(-i chi) phi``, ``a -> a + 2 d chi``."""
    lat = _same_lattice(phi, a)
    chi = np.asarray(chi, dtype=float)
    if chi.shape != lat.shape:
        raise ShapeError(f"gauge function has shape {chi.shape}, expected {lat.shape}")
    new_phi = np.exp(-1j * chi)[..., None] * phi.values
    new_a = a.values + 2.0 * lt.d_site_to_link(lat, chi)
    return SpinorField(lat, new_phi), ConnectionField(lat, new_a)


def link_phases(lat: Lattice, a: np.ndarray) -> np.ndarray:
    # half the line integral of a along each link, matching the 1/2 in nabla_A
    theta = 0.5 * lat.h * a
    U = np.empty(a.shape, dtype=np.complex128)
    U.real = np.cos(theta)
    U.imag = np.sin(theta)
    return U


def covariant_diff_values(
    lat: Lattice, phi: np.ndarray, a: np.ndarray, U: np.ndarray | None = None
) -> np.ndarray:
    """Array kernel behind :func:`covariant_diff`; returns ``(m, *shape, N)``."""
    if U is None:
        U = link_phases(lat, a)
    D = np.empty((lat.m,) + phi.shape, dtype=np.complex128)
    for k in range(lat.m):
        np.multiply(U[k][..., None], lt.shift(phi, k), out=D[k])
        D[k] -= phi
    D *= 1.0 / lat.h
    return D


def covariant_diff(phi: SpinorField, a: ConnectionField) -> np.ndarray:
    """Gauge-covariant forward difference.

    ``D_k phi(x) = (exp(i h a_k(x) / 2) phi(x + h e_k) - phi(x)) / h``, which
    transforms as ``D_k phi(x) -> exp(-i chi(x)) D_k phi(x)`` under
    :func:`gauge_transform`.
    """
    lat = _same_lattice(phi, a)
    return covariant_diff_values(lat, phi.values, a.values)


def covariant_diff_adjoint(
    lat: Lattice, a: np.ndarray, w: np.ndarray, U: np.ndarray | None = None
) -> np.ndarray:
    """Exact adjoint of the covariant difference for link spinors ``w``."""
    if U is None:
        U = link_phases(lat, a)
    out = -np.sum(w, axis=0)
    for k in range(lat.m):
        out += lt.shift(np.conj(U[k])[..., None] * w[k], k, -1)
    out *= 1.0 / lat.h
    return out


class Norms(NamedTuple):
    l2: float
    sup: float


def norms(obj, lat: Lattice | None = None) -> Norms:
    """Weighted L2 norm and sup of pointwise modulus.

    Spinors use the Euclidean norm of the fiber vector at each site; link and
    plaquette arrays (pass ``lat``) use the modulus of each component.
    """
    if isinstance(obj, SpinorField):
        lat, pointwise = obj.lattice, obj.modulus()
    elif isinstance(obj, ConnectionField):
        lat, pointwise = obj.lattice, np.abs(obj.values)
    else:
        if lat is None:
            raise ShapeError("raw arrays need an explicit lattice")
        pointwise = np.abs(np.asarray(obj))
    if pointwise.size == 0:
        return Norms(0.0, 0.0)
    l2 = float(np.sqrt(lat.cell_volume * np.sum(pointwise**2)))
    return Norms(l2, float(np.max(pointwise)))


INITIAL_KINDS = ("random_fourier", "bubble", "maxwell_mode", "constant")


@dataclass(frozen=True)
class InitialDataSpec:
    kind: str = "random_fourier"
    amplitude: float = 0.5
    seed: int = 0
    max_mode: int = 2
    center: Sequence[float] | None = None
    width: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def validate(self, lat: Lattice):
        if self.kind not in INITIAL_KINDS:
            raise ConfigurationError(f"unknown initial data kind {self.kind!r}", key="kind")
        if not np.isfinite(self.amplitude) or self.amplitude < 0:
            raise ConfigurationError("amplitude must be >= 0", key="amplitude")
        if self.max_mode < 1:
            raise ConfigurationError("max_mode must be >= 1", key="max_mode")
        if self.kind == "random_fourier" and 2 * self.max_mode >= lat.n:
            raise ConfigurationError(
                f"max_mode {self.max_mode} not resolved on n={lat.n}", key="max_mode"
            )
        if self.width is not None and not 0 < self.width <= lat.L / 4:
            raise ConfigurationError("width must lie in (0, L/4]", key="width")
        if self.center is not None and len(self.center) != lat.m:
            raise ConfigurationError(f"center needs {lat.m} coordinates", key="center")


def _band_limited(lat: Lattice, rng: np.random.Generator, max_mode: int) -> np.ndarray:
    """Real field with Fourier modes |k_i| <= max_mode and 1/(1+|k|^2) decay."""
    box = 2 * max_mode + 1
    coeffs = rng.standard_normal((box,) * lat.m) + 1j * rng.standard_normal((box,) * lat.m)
    ks = np.meshgrid(*([np.arange(-max_mode, max_mode + 1)] * lat.m), indexing="ij")
    coeffs /= 1.0 + sum(k**2 for k in ks)
    spectrum = np.zeros(lat.shape, dtype=np.complex128)
    spectrum[tuple(k % lat.n for k in ks)] = coeffs
    return np.real(np.fft.ifftn(spectrum)) * lat.site_count


def make_initial(
    spec: InitialDataSpec, lat: Lattice, N: int
) -> tuple[SpinorField, ConnectionField]:
    spec.validate(lat)
    amp = float(spec.amplitude)
    phi = np.zeros(lat.shape + (N,), dtype=np.complex128)
    a = np.zeros((lat.m,) + lat.shape)

    if spec.kind == "constant":
        phi[..., 0] = amp
    elif spec.kind == "maxwell_mode":
        x = lat.coords()
        a[1] = amp * np.sin(2 * np.pi * x[0] / lat.L)
    elif spec.kind == "random_fourier":
        rng = np.random.Generator(np.random.PCG64(spec.seed))
        for c in range(N):
            phi[..., c] = _band_limited(lat, rng, spec.max_mode) + 1j * _band_limited(
                lat, rng, spec.max_mode
            )
        for k in range(lat.m):
            a[k] = _band_limited(lat, rng, spec.max_mode)
        sup_phi = np.max(np.sqrt(np.sum(np.abs(phi) ** 2, axis=-1)))
        sup_a = np.max(np.abs(a))
        phi *= amp / sup_phi if sup_phi > 0 else 0.0
        a *= amp / sup_a if sup_a > 0 else 0.0
    else:  # bubble
        center = spec.center if spec.center is not None else [lat.L / 2] * lat.m
        width = spec.width if spec.width is not None else lat.L / 16
        off = lt.site_offsets(lat, center)
        r2 = np.sum(off**2, axis=0)
        profile = np.exp(-r2 / (2 * width**2))
        phi[..., 0] = amp * profile
        # rotation generator in the (x1, x2) plane
        a[0] = -amp * profile * off[1] / width**2
        a[1] = amp * profile * off[0] / width**2

    return SpinorField(lat, phi), ConnectionField(lat, a)
