import numpy as np
import pytest
from conftest import random_fields
from hypothesis import given, settings
from hypothesis import strategies as st

from swflow import lattice as lt
from swflow.errors import ConfigurationError, DomainError, ShapeError
from swflow.fields import (
    ConnectionField,
    InitialDataSpec,
    SpinorField,
    covariant_diff,
    covariant_diff_adjoint,
    gauge_transform,
    make_initial,
    norms,
)
from swflow.lattice import Lattice


def test_containers_validate_shape_and_finiteness(small_lattice):
    lat = small_lattice
    with pytest.raises(ShapeError):
        SpinorField(lat, np.zeros((4, 4, 4, 2), dtype=complex))
    with pytest.raises(ShapeError):
        ConnectionField(lat, np.zeros(lat.shape))
    bad = np.zeros((lat.m,) + lat.shape)
    bad[0, 0, 0, 0, 0] = np.nan
    with pytest.raises(DomainError):
        ConnectionField(lat, bad)


def test_constant_gauge_rotates_phase_only(small_lattice):
    phi, a = random_fields(small_lattice, 2, seed=1)
    chi = np.full(small_lattice.shape, 0.7)
    phi2, a2 = gauge_transform(phi, a, chi)
    np.testing.assert_allclose(phi2.values, np.exp(-0.7j) * phi.values, atol=1e-15)
    np.testing.assert_array_equal(a2.values, a.values)


def test_gauge_composition_and_inverse(small_lattice):
    lat = small_lattice
    phi, a = random_fields(lat, 2, seed=2)
    rng = np.random.default_rng(5)
    c1, c2 = rng.standard_normal(lat.shape), rng.standard_normal(lat.shape)
    once = gauge_transform(phi, a, c1 + c2)
    twice = gauge_transform(*gauge_transform(phi, a, c2), c1)
    np.testing.assert_allclose(once[0].values, twice[0].values, atol=1e-13)
    np.testing.assert_allclose(once[1].values, twice[1].values, atol=1e-12)
    back = gauge_transform(*gauge_transform(phi, a, c1), -c1)
    np.testing.assert_allclose(back[0].values, phi.values, atol=1e-13)
    np.testing.assert_allclose(back[1].values, a.values, atol=1e-13)


def test_gauge_transform_lattice_mismatch(small_lattice):
    phi, _ = random_fields(small_lattice, 2)
    _, a = random_fields(Lattice(4, 4, 1.0), 2)
    with pytest.raises(ShapeError):
        gauge_transform(phi, a, np.zeros(small_lattice.shape))


def _loop_covariant_diff(lat, phi, a, k, x):
    # direct evaluation at a single site with the +i h a / 2 link phase
    y = list(x)
    y[k] = (y[k] + 1) % lat.n
    return (np.exp(0.5j * lat.h * a[(k, *x)]) * phi[tuple(y)] - phi[x]) / lat.h


def test_covariant_diff_matches_pointwise_formula(small_lattice):
    lat = small_lattice
    phi, a = random_fields(lat, 2, seed=4)
    D = covariant_diff(phi, a)
    for x in [(0, 0, 0, 0), (3, 1, 2, 0), (3, 3, 3, 3)]:
        for k in range(lat.m):
            np.testing.assert_allclose(
                D[(k, *x)], _loop_covariant_diff(lat, phi.values, a.values, k, x), atol=1e-14
            )


def test_covariant_diff_trivial_cases(small_lattice):
    lat = small_lattice
    phi = SpinorField(lat, np.full(lat.shape + (2,), 1.5 - 0.5j))
    assert np.all(covariant_diff(phi, ConnectionField.zeros(lat)) == 0)
    psi, _ = random_fields(lat, 2, seed=8)
    D = covariant_diff(psi, ConnectionField.zeros(lat))
    for k in range(lat.m):
        np.testing.assert_allclose(D[k], (lt.shift(psi.values, k) - psi.values) / lat.h, atol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_covariant_diff_is_gauge_covariant(seed):
    lat = Lattice(4, 4, 3.0)
    phi, a = random_fields(lat, 2, seed=seed)
    chi = np.random.default_rng(seed + 1).uniform(-np.pi, np.pi, lat.shape)
    D = covariant_diff(phi, a)
    D2 = covariant_diff(*gauge_transform(phi, a, chi))
    np.testing.assert_allclose(D2, np.exp(-1j * chi)[None, ..., None] * D, atol=1e-12)


def test_covariant_diff_is_linear(small_lattice):
    lat = small_lattice
    p1, a = random_fields(lat, 2, seed=1)
    p2, _ = random_fields(lat, 2, seed=2)
    combo = SpinorField(lat, 2.0 * p1.values - 0.5j * p2.values)
    np.testing.assert_allclose(
        covariant_diff(combo, a),
        2.0 * covariant_diff(p1, a) - 0.5j * covariant_diff(p2, a),
        atol=1e-12,
    )


def test_covariant_diff_adjoint_pairing(small_lattice):
    lat = small_lattice
    phi, a = random_fields(lat, 3, seed=11)
    rng = np.random.default_rng(12)
    w = rng.standard_normal((lat.m,) + lat.shape + (3,)) + 1j * rng.standard_normal(
        (lat.m,) + lat.shape + (3,)
    )
    lhs = np.vdot(w, covariant_diff(phi, a))
    rhs = np.vdot(covariant_diff_adjoint(lat, a.values, w), phi.values)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_gauge_invariant_pointwise_quantities(small_lattice):
    lat = small_lattice
    phi, a = random_fields(lat, 2, seed=3)
    chi = np.random.default_rng(9).standard_normal(lat.shape)
    phi2, a2 = gauge_transform(phi, a, chi)
    np.testing.assert_allclose(phi2.modulus(), phi.modulus(), atol=1e-13)
    np.testing.assert_allclose(
        lt.d_link_to_plaq(lat, a2.values), lt.d_link_to_plaq(lat, a.values), atol=1e-12
    )
    n1 = norms(covariant_diff(phi, a), lat)
    n2 = norms(covariant_diff(phi2, a2), lat)
    assert n1.l2 == pytest.approx(n2.l2, rel=1e-12)


def test_norms_examples():
    lat = Lattice(4, 4, 2.0)
    assert tuple(norms(SpinorField.zeros(lat, 2))) == (0.0, 0.0)
    vals = np.zeros(lat.shape + (2,), dtype=complex)
    vals[..., 0] = 2.0
    l2, sup = norms(SpinorField(lat, vals))
    assert sup == 2.0
    assert l2 == pytest.approx(2.0 * lat.L ** (lat.m / 2), rel=1e-14)
    phi, a = random_fields(lat, 2, seed=0)
    for obj in (phi, a):
        l2, sup = norms(obj)
        assert sup >= l2 / np.sqrt(lat.volume) * (1 - 1e-14)
    with pytest.raises(ShapeError):
        norms(np.zeros(3))


def test_constant_and_maxwell_presets():
    lat = Lattice(4, 6, 3.0)
    phi, a = make_initial(InitialDataSpec("constant", amplitude=2.0), lat, 2)
    assert np.all(phi.values[..., 0] == 2.0) and np.all(phi.values[..., 1] == 0.0)
    assert np.all(a.values == 0.0)
    phi, a = make_initial(InitialDataSpec("maxwell_mode", amplitude=0.3), lat, 2)
    assert np.all(phi.values == 0)
    expected = 0.3 * np.sin(2 * np.pi * lat.coords()[0] / lat.L)
    np.testing.assert_array_equal(a.values[1], expected)
    assert np.all(np.delete(a.values, 1, axis=0) == 0)


def test_random_fourier_is_seeded_normalized_and_band_limited():
    lat = Lattice(4, 8, 2 * np.pi)
    spec = InitialDataSpec("random_fourier", amplitude=0.4, seed=17, max_mode=2)
    phi, a = make_initial(spec, lat, 2)
    phi2, a2 = make_initial(spec, lat, 2)
    assert phi.values.tobytes() == phi2.values.tobytes()
    assert a.values.tobytes() == a2.values.tobytes()
    assert np.max(phi.modulus()) == pytest.approx(0.4, rel=1e-14)
    assert np.max(np.abs(a.values)) == pytest.approx(0.4, rel=1e-14)
    other, _ = make_initial(InitialDataSpec("random_fourier", seed=18), lat, 2)
    assert not np.allclose(other.values, phi.values)
    for field, axes in ((phi.values, (0, 1, 2, 3)), (a.values, (1, 2, 3, 4))):
        for ax in axes:
            spectrum = np.abs(np.fft.fft(field, axis=ax))
            freqs = np.abs(np.fft.fftfreq(lat.n, d=1.0 / lat.n))
            high = np.take(spectrum, np.flatnonzero(freqs > 2), axis=ax)
            assert np.max(high) < 1e-12 * max(1.0, np.max(spectrum))


def test_bubble_preset_concentrates_at_center():
    lat = Lattice(5, 8, 8.0)
    phi, a = make_initial(InitialDataSpec("bubble", amplitude=0.7, width=1.0), lat, 4)
    mod = phi.modulus()
    assert mod[(4,) * 5] == pytest.approx(0.7)
    assert np.unravel_index(np.argmax(mod), lat.shape) == (4,) * 5
    # azimuthal: only the (x1, x2) components, tangent to circles about the center
    assert np.all(a.values[2:] == 0)
    off = lt.site_offsets(lat, (4.0,) * 5)
    radial = a.values[0] * off[0] + a.values[1] * off[1]
    np.testing.assert_allclose(radial, 0.0, atol=1e-14)


@pytest.mark.parametrize(
    "kwargs, key",
    [
        ({"kind": "vortex"}, "kind"),
        ({"amplitude": -1.0}, "amplitude"),
        ({"max_mode": 0}, "max_mode"),
        ({"max_mode": 4}, "max_mode"),
        ({"kind": "bubble", "width": 5.0}, "width"),
        ({"kind": "bubble", "center": (1.0, 2.0)}, "center"),
    ],
)
def test_initial_spec_validation(kwargs, key):
    lat = Lattice(4, 8, 2 * np.pi)
    with pytest.raises(ConfigurationError) as err:
        make_initial(InitialDataSpec(**kwargs), lat, 2)
    assert err.value.key == key
