import numpy as np
import pytest

from swflow.fields import ConnectionField, SpinorField
from swflow.lattice import Lattice

# acceptance criteria append (label, passed, detail) here; printed at session end
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def random_fields(lat: Lattice, N: int, seed: int = 0, scale: float = 0.5):
    rng = np.random.default_rng(seed)
    phi = scale * (
        rng.standard_normal(lat.shape + (N,)) + 1j * rng.standard_normal(lat.shape + (N,))
    )
    a = scale * rng.standard_normal((lat.m,) + lat.shape)
    return SpinorField(lat, phi), ConnectionField(lat, a)


@pytest.fixture
def small_lattice():
    return Lattice(m=4, n=4, L=2 * np.pi)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
