import numpy as np
import pytest

from swlab.equations import constant_solution, random_configuration
from swlab.gauge import GaugeTransform
from swlab.grid import GridSpec, random_field
from swlab.linearization import FieldBasis, random_tangent, tangent_to_vector
from swlab.symplectic import (
    Psi0Reference, acs_apply, closedness_defect, gauge_orbit_orthogonality, gauge_transform_config, gram_g,
    hamiltonian_check, metric_g, nondegeneracy_probe, omega, omega_psi0, push_forward,
)


@pytest.fixture
def point(torus16, rng):
    p = random_configuration(torus16, rng)
    return p, random_tangent(torus16, rng), random_tangent(torus16, rng)


def test_metric_is_symmetric_and_positive(point):
    p, X, Y = point
    assert metric_g(p, X, Y) == pytest.approx(metric_g(p, Y, X), rel=1e-13)
    assert metric_g(p, X, X) > 0


def test_compatibility_triple(point):
    p, X, Y = point
    assert metric_g(p, acs_apply(X), Y) == pytest.approx(omega(p, X, Y), rel=1e-13, abs=1e-12)
    assert omega(p, acs_apply(X), acs_apply(Y)) == pytest.approx(omega(p, X, Y), rel=1e-13, abs=1e-12)
    assert omega(p, X, X) == pytest.approx(0.0, abs=1e-12)


def test_forms_are_gauge_invariant(point, rng):
    p, X, Y = point
    gt = GaugeTransform.from_angle(random_field(p.grid, rng, real=True))
    q = gauge_transform_config(p, gt)
    assert metric_g(q, push_forward(gt, X), push_forward(gt, Y)) == pytest.approx(metric_g(p, X, Y), rel=1e-12)
    assert omega(q, push_forward(gt, X), push_forward(gt, Y)) == pytest.approx(omega(p, X, Y), rel=1e-12)


def test_weighted_form_reduces_to_omega_for_unit_reference(point):
    p, X, Y = point
    p = p.with_(H=np.ones(p.grid.shape))
    one = Psi0Reference(np.ones(p.grid.shape, dtype=complex), [])
    assert omega_psi0(p, one, X, Y) == pytest.approx(omega(p, X, Y), rel=1e-13)


def test_single_zero_reference_has_one_zero(torus16, patch32):
    for g in (torus16, patch32):
        ref = Psi0Reference.single_zero(g)
        assert len(ref.zero_set) == 1
        assert np.min(np.abs(np.delete(ref.psi0.ravel(), np.argmin(np.abs(ref.psi0))))) > 0


def test_moment_map_is_hamiltonian(point, rng):
    p, X, _ = point
    dh, rhs = hamiltonian_check(p, 1j * random_field(p.grid, rng, real=True), X)
    assert abs(dh - rhs) <= 1e-10 * abs(dh)


def test_closedness(point):
    p, X, Y = point
    assert abs(closedness_defect(p, X, Y, X * 0.5 + Y)) < 1e-10 * metric_g(p, X, X)


def test_gram_matrix_agrees_with_metric(torus8, rng):
    p = random_configuration(torus8, rng)
    basis = FieldBasis.for_grid(torus8)
    G = gram_g(p, basis)
    X, Y = random_tangent(torus8, rng), random_tangent(torus8, rng)
    # project onto the basis first; the Gram matrix lives there
    x, y = tangent_to_vector(basis, X), tangent_to_vector(basis, Y)
    from swlab.linearization import tangent_from_vector

    val = metric_g(p, tangent_from_vector(basis, x), tangent_from_vector(basis, y))
    assert x @ G @ y == pytest.approx(val, rel=1e-12)


def test_orbit_orthogonality_with_controls(torus8, rng):
    p = constant_solution(torus8, 0.5 + 0.5j, 0.7 - 0.1j, H=1.3)
    rep = gauge_orbit_orthogonality(p, rng)
    assert rep.orbit_direction_residual < 1e-8
    assert rep.projected_residual < 1e-8
    assert rep.unprojected_residual > 1e-3


def test_weighted_form_is_nondegenerate_on_probes(torus8, rng):
    p = constant_solution(torus8, 0.0, 0.5, 1.0j)
    sv, gram = nondegeneracy_probe(p, Psi0Reference.single_zero(torus8), rng)
    assert np.allclose(gram, -gram.T, atol=1e-12)
    assert sv[-1] > 1e-8 * sv[0]
