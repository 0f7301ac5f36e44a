"""Euclidean Clifford generators and spinor fiber conventions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import ConfigurationError, UnsupportedOperationError

_SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
_SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)


@dataclass(frozen=True)
class CliffordRep:
    m: int
    N: int
    gammas: tuple[np.ndarray, ...]

    def anticommutator(self, j: int, k: int) -> np.ndarray:
        gj, gk = self.gammas[j], self.gammas[k]
        return gj @ gk + gk @ gj


def _volume_element(gammas) -> np.ndarray:
    # i^k g_1...g_2k squares to the identity and is Hermitian
    k = len(gammas) // 2
    return (1j**k) * reduce(np.matmul, gammas)


def _even_generators(m: int) -> list[np.ndarray]:
    gammas = [_SIGMA1, _SIGMA2]
    while len(gammas) < m:
        chir = _volume_element(gammas)
        eye = np.eye(gammas[0].shape[0], dtype=complex)
        gammas = [np.kron(g, _SIGMA1) for g in gammas] + [
            np.kron(chir, _SIGMA1),
            np.kron(eye, _SIGMA2),
        ]
    return gammas


def gamma_matrices(m: int) -> CliffordRep:
    """Hermitian generators with {g_j, g_k} = 2 delta_jk for 2 <= m <= 8.

    Even dimensions use the tensor-product recursion; an odd dimension
    appends the volume element of the even dimension below it.
    """
    if not isinstance(m, (int, np.integer)) or not 2 <= m <= 8:
        raise ConfigurationError(f"Clifford dimension must be in 2..8, got {m!r}", key="m")
    m = int(m)
    if m % 2 == 0:
        gammas = _even_generators(m)
    else:
        gammas = _even_generators(m - 1)
        gammas = gammas + [_volume_element(gammas)]
    return CliffordRep(m=m, N=gammas[0].shape[0], gammas=tuple(gammas))


def chirality_projector(rep: CliffordRep) -> np.ndarray:
    """Projector (I + Gamma)/2 onto the positive half-spinor space."""
    if rep.m % 2:
        raise UnsupportedOperationError(f"no half-spinor splitting in odd dimension m={rep.m}")
    chir = _volume_element(list(rep.gammas))
    return 0.5 * (np.eye(rep.N, dtype=complex) + chir)


def fiber_dimension(m: int, half: bool) -> int:
    if not 4 <= m <= 7:
        raise ConfigurationError(f"m must be in 4..7, got {m!r}", key="m")
    if half:
        if m % 2:
            raise UnsupportedOperationError(f"half spinors need even m, got m={m}")
        return 2 ** (m // 2 - 1)
    return 2 ** (m // 2)


def default_fiber_dimension(m: int) -> int:
    """Half-spinor fiber for even m, full spinor fiber for odd m."""
    return fiber_dimension(m, half=(m % 2 == 0))
