"""Discrete Seiberg-Witten-type functional and its negative L2 gradient.

    SW(phi, a) = h^m sum_x [ sum_k |D_k phi|^2 + 1/2 sum_{j<k} f_jk^2
                             + S/4 |phi|^2 + 1/8 |phi|^4 ]

The flow velocity ``(psi, b)`` is the unique pair with

    d/de SW(phi + e dphi, a + e da) = -h^m sum [ 2 Re<dphi, psi> + da . b ].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import lattice as lt
from .errors import ConfigurationError, ShapeError
from .fields import (
    ConnectionField,
    SpinorField,
    covariant_diff_adjoint,
    covariant_diff_values,
    link_phases,
)
from ._kernels import density_kernel, neighbor_tables, rhs_kernel
from .lattice import Lattice


@dataclass(frozen=True)
class ModelParams:
    """``S`` is a constant potential coefficient standing in for scalar curvature."""

    S: float
    lattice: Lattice
    N: int

    def __post_init__(self):
        if not np.isfinite(self.S):
            raise ConfigurationError("S must be finite", key="s_const")
        if self.N < 1:
            raise ConfigurationError("fiber dimension must be >= 1", key="fiber_dim")

    def check(self, phi: SpinorField, a: ConnectionField):
        if phi.lattice != self.lattice or a.lattice != self.lattice:
            raise ShapeError("fields and model parameters use different lattices")
        if phi.N != self.N:
            raise ShapeError(f"spinor fiber {phi.N} != configured N={self.N}")


def curvature(a: ConnectionField) -> np.ndarray:
    """Real carrier ``f`` of ``F_A = i f``; plaquette array."""
    return lt.d_link_to_plaq(a.lattice, a.values)


def _abs2(z: np.ndarray) -> np.ndarray:
    return z.real**2 + z.imag**2


def density_reference(lat: Lattice, phi: np.ndarray, a: np.ndarray, S: float) -> np.ndarray:
    """Vectorized stencil form of the energy density (reference for the kernel)."""
    D = covariant_diff_values(lat, phi, a)
    f = lt.d_link_to_plaq(lat, a)
    rho = np.sum(_abs2(phi), axis=-1)
    grad = np.sum(_abs2(D), axis=(0, -1))
    return grad + 0.5 * np.sum(f**2, axis=0) + 0.25 * S * rho + 0.125 * rho**2


def _flat(lat: Lattice, phi: np.ndarray, a: np.ndarray):
    fwd, bwd, pj, pk = neighbor_tables(lat.m, lat.n)
    phi_flat = np.ascontiguousarray(phi).reshape(lat.site_count, phi.shape[-1])
    a_flat = np.ascontiguousarray(a).reshape(lat.m, lat.site_count)
    return phi_flat, a_flat, fwd, bwd, pj, pk


def _density(lat: Lattice, phi: np.ndarray, a: np.ndarray, S: float) -> np.ndarray:
    phi_flat, a_flat, fwd, _, pj, pk = _flat(lat, phi, a)
    return density_kernel(phi_flat, a_flat, fwd, pj, pk, lat.h, float(S)).reshape(lat.shape)


def energy_density(phi: SpinorField, a: ConnectionField, params: ModelParams) -> np.ndarray:
    """Per-site energy; link and plaquette terms are attributed to their base site."""
    params.check(phi, a)
    return _density(params.lattice, phi.values, a.values, params.S)


def sw_functional(phi: SpinorField, a: ConnectionField, params: ModelParams) -> float:
    params.check(phi, a)
    lat = params.lattice
    return float(lat.cell_volume * np.sum(_density(lat, phi.values, a.values, params.S)))


def sw_values(lat: Lattice, phi: np.ndarray, a: np.ndarray, S: float) -> float:
    return float(lat.cell_volume * np.sum(_density(lat, phi, a, S)))


def rhs_reference(
    lat: Lattice, phi: np.ndarray, a: np.ndarray, S: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized stencil form of the flow velocity (reference for the kernel)."""
    U = link_phases(lat, a)
    D = covariant_diff_values(lat, phi, a, U)
    rho = np.sum(_abs2(phi), axis=-1)
    psi = covariant_diff_adjoint(lat, a, D, U)
    psi += 0.25 * (S + rho)[..., None] * phi
    np.negative(psi, out=psi)
    # d/da_k of |D_k phi|^2 reduces exactly to -Im<D_k phi, phi>
    current = np.sum(D.imag * phi.real - D.real * phi.imag, axis=-1)
    f = lt.d_link_to_plaq(lat, a)
    b = lt.codiff_plaq_to_link(lat, f)
    b += current
    np.negative(b, out=b)
    return psi, b


def rhs_values(
    lat: Lattice, phi: np.ndarray, a: np.ndarray, S: float
) -> tuple[np.ndarray, np.ndarray]:
    """Array kernel of :func:`flow_rhs`."""
    phi_flat, a_flat, fwd, bwd, pj, pk = _flat(lat, phi, a)
    psi, b = rhs_kernel(phi_flat, a_flat, fwd, bwd, pj, pk, lat.h, float(S))
    return psi.reshape(phi.shape), b.reshape(a.shape)


def flow_rhs(
    phi: SpinorField, a: ConnectionField, params: ModelParams
) -> tuple[np.ndarray, np.ndarray]:
    """Spinor and link velocities of the gradient flow.

    ``psi = -D*D phi - (S + |phi|^2) phi / 4`` and
    ``b = -d*f - J`` with ``J_k = -Im sum_c conj(D_k phi_c) phi_c``.
    """
    params.check(phi, a)
    return rhs_values(params.lattice, phi.values, a.values, params.S)


def dissipation(lat: Lattice, psi: np.ndarray, b: np.ndarray) -> float:
    """``h^m sum (2|psi|^2 + |b|^2)``, the rate at which SW decreases."""
    return float(lat.cell_volume * (2.0 * np.sum(np.abs(psi) ** 2) + np.sum(b**2)))


class GradientReport(NamedTuple):
    max_rel_err: float
    max_abs_err: float
    samples: int


def gradient_check(
    phi: SpinorField,
    a: ConnectionField,
    params: ModelParams,
    step: float = 1e-4,
    seed: int = 0,
    n_dirs: int = 20,
) -> GradientReport:
    """Compare central differences of SW with the flow-velocity pairing.

    Samples ``n_dirs`` coordinate directions split between the spinor (real
    and imaginary parts) and the connection. When both sides are below
    ``1e-12`` in magnitude the pair is treated as an exact match.
    """
    if step <= 0:
        raise ConfigurationError("step must be positive", key="step")
    params.check(phi, a)
    lat = params.lattice
    psi, b = rhs_values(lat, phi.values, a.values, params.S)
    rng = np.random.Generator(np.random.PCG64(seed))
    rel = absolute = 0.0
    for i in range(n_dirs):
        dphi = np.zeros_like(phi.values)
        da = np.zeros_like(a.values)
        if i % 2 == 0:
            idx = tuple(int(v) for v in rng.integers(0, dphi.shape))
            unit = 1.0 if rng.integers(0, 2) == 0 else 1j
            dphi[idx] = unit
            predicted = -lat.cell_volume * 2.0 * np.real(np.conj(unit) * psi[idx])
        else:
            idx = tuple(int(v) for v in rng.integers(0, da.shape))
            da[idx] = 1.0
            predicted = -lat.cell_volume * b[idx]
        plus = _density(lat, phi.values + step * dphi, a.values + step * da, params.S)
        minus = _density(lat, phi.values - step * dphi, a.values - step * da, params.S)
        # sites away from the perturbation cancel exactly in the per-site
        # difference, which avoids cancellation in the global SW sum
        measured = lat.cell_volume * float(np.sum(plus - minus)) / (2 * step)
        err = abs(measured - predicted)
        scale = max(abs(measured), abs(predicted))
        absolute = max(absolute, err)
        if scale > 1e-12:
            rel = max(rel, err / scale)
    return GradientReport(rel, absolute, n_dirs)
