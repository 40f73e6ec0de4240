import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swlab.grid import (
    DomainMismatch, GridSpec, OneForm, bandlimited_basis, derivative, exterior_d, hodge_star, integrate_function,
    integrate_two_form, laplacian, partial, random_field, star1, sup_norm, wedge,
)


def test_spectral_derivative_of_plane_wave_is_exact(torus16):
    g = torus16
    f = np.exp(1j * (2 * g.x - 3 * g.y))
    assert np.allclose(partial(f, g, "x"), 2j * f, atol=1e-12)
    assert np.allclose(partial(f, g, "y"), -3j * f, atol=1e-12)
    assert np.allclose(derivative(f, g, "zbar"), 0.5 * (2j + 1j * (-3j)) * f, atol=1e-12)


def test_laplacian_matches_eigenvalue(torus16):
    g = torus16
    f = np.cos(3 * g.x) * np.sin(2 * g.y)
    assert np.allclose(laplacian(f, g), -13 * f, atol=1e-11)


def test_patch_laplacian_second_order():
    errs = []
    for n in (32, 64):
        g = GridSpec.patch(n, r0=0.5)
        f = np.exp(2 * g.x) * np.cos(2 * g.y)  # harmonic
        errs.append(sup_norm(laplacian(f, g), g))
    assert np.log2(errs[0] / errs[1]) > 1.9


def test_holomorphic_function_has_zero_dbar(patch32):
    g = patch32
    f = np.exp(g.z) + g.z**3
    assert sup_norm(derivative(f, g, "zbar"), g) < 1e-4
    assert sup_norm(derivative(f, g, "z") - (np.exp(g.z) + 3 * g.z**2), g) < 1e-4


def test_exact_forms_are_closed(torus16, rng):
    g = torus16
    f = random_field(g, rng)
    a = OneForm(derivative(f, g, "z"), derivative(f, g, "zbar"))
    assert np.max(np.abs(exterior_d(a, g).coeff)) < 1e-11


def test_hodge_star_squares_to_minus_one(torus8, rng):
    a = OneForm(random_field(torus8, rng), random_field(torus8, rng))
    b = hodge_star(hodge_star(a))
    assert np.allclose(b.p10, -a.p10) and np.allclose(b.p01, -a.p01)


def test_star1_squares_to_minus_one(torus8, rng):
    a = OneForm(random_field(torus8, rng), random_field(torus8, rng))
    b = star1(star1(a))
    assert np.allclose(b.p10, -a.p10) and np.allclose(b.p01, -a.p01)


def test_wedge_is_antisymmetric(torus8, rng):
    a = OneForm(random_field(torus8, rng), random_field(torus8, rng))
    b = OneForm(random_field(torus8, rng), random_field(torus8, rng))
    assert np.allclose(wedge(a, b).coeff, -wedge(b, a).coeff)
    assert np.allclose(wedge(a, a).coeff, 0)


def test_area_of_torus(torus16):
    g = torus16
    assert integrate_function(np.ones(g.shape), g) == pytest.approx(4 * np.pi**2)
    # dx^dy = (i/2) dz^dzbar
    assert integrate_two_form(type(exterior_d(OneForm.zeros(g), g))(0.5j * np.ones(g.shape)), g) == pytest.approx(4 * np.pi**2)


def test_domain_checks():
    with pytest.raises(ValueError):
        GridSpec.torus(7)
    with pytest.raises(ValueError):
        GridSpec.patch(32, r0=1.5)
    g = GridSpec.torus(8)
    with pytest.raises(DomainMismatch):
        partial(np.zeros((16, 16)), g, "x")
    with pytest.raises(DomainMismatch):
        bandlimited_basis(GridSpec.patch(16))


def test_bandlimited_basis_is_orthonormal_and_nyquist_free(torus8):
    Q = bandlimited_basis(torus8)
    assert Q.shape == (64, 49)
    assert np.allclose(Q.T @ Q, np.eye(49), atol=1e-12)
    spec = np.fft.fft2(Q.T.reshape(-1, 8, 8), axes=(-2, -1))
    assert np.max(np.abs(spec[:, 4, :])) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
def test_derivative_is_linear(a, b, seed):
    g = GridSpec.torus(8)
    rng = np.random.default_rng(seed)
    f, h = random_field(g, rng), random_field(g, rng)
    lhs = derivative(a * f + b * h, g, "z")
    rhs = a * derivative(f, g, "z") + b * derivative(h, g, "z")
    assert np.allclose(lhs, rhs, atol=1e-10)
