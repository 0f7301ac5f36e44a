"""Flat periodic lattice and discrete exterior calculus on it.

Array conventions (``shape = (n,) * m``):

* site scalars: ``shape``
* link fields: ``(m, *shape)``; component ``k`` at site ``x`` lives on the
  link ``x -> x + h e_k``
* plaquette fields: ``(m(m-1)/2, *shape)``; component ``p`` corresponds to
  ``lattice.pairs[p] = (j, k)`` with ``j < k``, based at ``x``

All pairings carry the cell weight ``h**m``. Forward differences implement
``d`` and the exact adjoints are backward differences.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, ShapeError


@dataclass(frozen=True)
class Lattice:
    m: int
    n: int
    L: float

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or not 4 <= self.m <= 7:
            raise ConfigurationError(f"m must be an integer in 4..7, got {self.m!r}", key="m")
        if not isinstance(self.n, (int, np.integer)) or self.n < 4:
            raise ConfigurationError(f"n must be an integer >= 4, got {self.n!r}", key="n")
        if not np.isfinite(self.L) or self.L <= 0:
            raise ConfigurationError(f"length must be positive, got {self.L!r}", key="length")

    @property
    def h(self) -> float:
        return self.L / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.m

    @property
    def site_count(self) -> int:
        return self.n**self.m

    @property
    def cell_volume(self) -> float:
        return self.h**self.m

    @property
    def volume(self) -> float:
        return self.L**self.m

    @property
    def injectivity_radius(self) -> float:
        return self.L / 2

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(itertools.combinations(range(self.m), 2))

    @cached_property
    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return tuple(itertools.combinations(range(self.m), 3))

    def coords(self) -> np.ndarray:
        """Site coordinates, shape ``(m, *shape)``."""
        axis = np.arange(self.n) * self.h
        return np.stack(np.meshgrid(*([axis] * self.m), indexing="ij"))

    def site_index(self, site) -> int:
        """Lexicographic index of an integer site, last axis fastest."""
        return int(np.ravel_multi_index(tuple(int(s) % self.n for s in site), self.shape))

    def site_of(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.shape))


def build_lattice(m: int, n: int, L: float) -> Lattice:
    return Lattice(m=m, n=n, L=float(L))


def _check(arr: np.ndarray, shape: tuple[int, ...], what: str):
    if arr.shape != shape:
        raise ShapeError(f"{what} has shape {arr.shape}, expected {shape}")


def shift(arr: np.ndarray, axis: int, step: int = 1) -> np.ndarray:
    """Periodic shift: ``shift(u, k)[x] == u[x + e_k]``."""
    return np.roll(arr, -step, axis=axis)


def d_site_to_link(lat: Lattice, chi: np.ndarray) -> np.ndarray:
    _check(chi, lat.shape, "site field")
    return np.stack([(shift(chi, k) - chi) / lat.h for k in range(lat.m)])


def codiff_link_to_site(lat: Lattice, b: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`d_site_to_link` (negative backward divergence)."""
    _check(b, (lat.m,) + lat.shape, "link field")
    out = np.zeros(lat.shape, dtype=b.dtype)
    for k in range(lat.m):
        out += shift(b[k], k, -1) - b[k]
    return out / lat.h


def d_link_to_plaq(lat: Lattice, a: np.ndarray) -> np.ndarray:
    _check(a, (lat.m,) + lat.shape, "link field")
    return np.stack(
        [((shift(a[k], j) - a[k]) - (shift(a[j], k) - a[j])) / lat.h for j, k in lat.pairs]
    )


def codiff_plaq_to_link(lat: Lattice, f: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`d_link_to_plaq` under the weighted pairings."""
    _check(f, (len(lat.pairs),) + lat.shape, "plaquette field")
    out = np.zeros((lat.m,) + lat.shape, dtype=f.dtype)
    for p, (j, k) in enumerate(lat.pairs):
        # f_jk depends on +a_k (differenced along j) and -a_j (along k)
        out[k] += shift(f[p], j, -1) - f[p]
        out[j] -= shift(f[p], k, -1) - f[p]
    return out / lat.h


def d_plaq_to_cube(lat: Lattice, f: np.ndarray) -> np.ndarray:
    """Alternating face sum over elementary 3-cubes; zero on ``d a``."""
    _check(f, (len(lat.pairs),) + lat.shape, "plaquette field")
    index = {pair: p for p, pair in enumerate(lat.pairs)}
    out = []
    for i, j, k in lat.triples:
        fjk, fik, fij = f[index[j, k]], f[index[i, k]], f[index[i, j]]
        out.append(
            ((shift(fjk, i) - fjk) - (shift(fik, j) - fik) + (shift(fij, k) - fij)) / lat.h
        )
    if not out:
        return np.zeros((0,) + lat.shape)
    return np.stack(out)


def antisymmetric(lat: Lattice, f: np.ndarray) -> np.ndarray:
    """Full antisymmetric array ``F[j, k]`` of shape ``(m, m, *shape)``."""
    full = np.zeros((lat.m, lat.m) + lat.shape, dtype=f.dtype)
    for p, (j, k) in enumerate(lat.pairs):
        full[j, k] = f[p]
        full[k, j] = -f[p]
    return full


def inner(lat: Lattice, u: np.ndarray, v: np.ndarray) -> float:
    """Weighted real pairing ``h^m * sum(Re(conj(u) v))``."""
    if u.shape != v.shape:
        raise ShapeError(f"pairing of shapes {u.shape} and {v.shape}")
    return float(lat.cell_volume * np.sum(np.real(np.conj(u) * v)))


def nearest_image(x, x0, L: float) -> np.ndarray:
    """Representative of ``x - x0`` in ``[-L/2, L/2)`` componentwise.

    Broadcasts over leading axes; the last axis of ``x`` and ``x0`` holds
    coordinates.
    """
    diff = np.asarray(x, dtype=float) - np.asarray(x0, dtype=float)
    return (diff + L / 2) % L - L / 2


def site_offsets(lat: Lattice, x0) -> np.ndarray:
    """Nearest-image offsets of every site from ``x0``, shape ``(m, *shape)``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (lat.m,):
        raise ShapeError(f"point has shape {x0.shape}, expected ({lat.m},)")
    coords = lat.coords()
    return np.stack([nearest_image(coords[k], x0[k], lat.L) for k in range(lat.m)])


def site_distances(lat: Lattice, x0) -> np.ndarray:
    off = site_offsets(lat, x0)
    return np.sqrt(np.sum(off**2, axis=0))
