import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swlab.equations import Configuration, constant_solution, random_configuration
from swlab.grid import GridSpec, random_field
from swlab.linearization import (
    FieldBasis, TangentVector, apply_d1, apply_d2, assemble_complex, cohomology_dims, dimension_formula, displace,
    image_to_vector, numerical_rank, random_tangent, raw_residuals, riemann_roch_index, tangent_from_vector,
    tangent_to_vector,
)


@pytest.fixture(scope="module")
def basis8():
    return FieldBasis.for_grid(GridSpec.torus(8))


def test_tangent_vector_round_trip(basis8, rng):
    v = rng.standard_normal(8 * basis8.size)
    assert np.allclose(tangent_to_vector(basis8, tangent_from_vector(basis8, v)), v, atol=1e-12)


def test_tangent_vectors_are_imaginary_valued(torus8, rng):
    X = random_tangent(torus8, rng)
    assert X.reality_defect() == 0.0
    assert (X * 2.0 - X).reality_defect() == 0.0


def test_d1_is_infinitesimal_gauge_action(torus16, rng):
    from swlab.gauge import GaugeTransform, gauge_act

    p = random_configuration(torus16, rng)
    zeta = 1j * 0.3 * np.sin(torus16.x)
    eps = 1e-6
    A, psi, _ = gauge_act(GaugeTransform(eps * zeta), p.A, p.psi, p.phi, torus16)
    X = apply_d1(p, zeta)
    assert np.allclose((A.potential.p10 - p.A.potential.p10) / eps, X.alpha.p10, atol=1e-8)
    assert np.allclose((psi.psi1 - p.psi.psi1) / eps, X.beta.psi1, atol=1e-5)


@pytest.mark.parametrize("phi,psi2bar", [(0.6 + 0.3j, None), (0.0, 1.7j)])
def test_d2_d1_vanishes_at_solutions(torus8, basis8, phi, psi2bar):
    p = constant_solution(torus8, phi, 0.5 - 0.4j, psi2bar, h=1.2, sigma=0.05, H=1.4)
    assert assemble_complex(p, basis=basis8).complex_defect() < 1e-12


def test_literal_reading_breaks_complex_when_spinor_moduli_differ(torus8, basis8):
    p = constant_solution(torus8, 0.0, 0.5, 1.5)
    assert assemble_complex(p, reading="literal", basis=basis8).complex_defect() > 1e-3


def test_d2_d1_equals_minus_zeta_times_dirac_residual(rng):
    # zeta is a single low mode so that zeta * psi stays below the Nyquist band
    g = GridSpec.torus(32)
    p = random_configuration(g, rng)
    zeta = 0.7j * np.cos(g.x - 2 * g.y)
    _, _, C = apply_d2(p, apply_d1(p, zeta))
    _, _, rows = raw_residuals(p)
    assert np.allclose(C.psi1, -zeta * rows.psi1, atol=1e-10)
    assert np.allclose(C.psi2bar, -zeta * rows.psi2bar, atol=1e-10)


def test_cohomology_at_nondegenerate_point(torus8, basis8):
    p = constant_solution(torus8, 0.8, 0.6 + 0.2j)
    rep = cohomology_dims(assemble_complex(p, basis=basis8))
    assert rep.h0 == 0 and rep.reliable
    assert rep.euler_characteristic == cohomology_dims(assemble_complex(p, t=0.0, basis=basis8)).euler_characteristic


@pytest.mark.parametrize("sub,expected", [("alpha", (1, 2, 1)), ("gamma", (0, 2, 2)), ("beta", (0, 4, 4))])
def test_flat_subcomplexes(torus8, basis8, sub, expected):
    rep = cohomology_dims(assemble_complex(Configuration.flat(torus8), t=0.0, subcomplex=sub, basis=basis8))
    assert (rep.h0, rep.h1, rep.h2) == expected


def test_unknown_subcomplex(torus8):
    with pytest.raises(ValueError):
        assemble_complex(Configuration.flat(torus8), subcomplex="delta")


def test_numerical_rank_gap():
    r, gap = numerical_rank(np.diag([1.0, 1e-3, 1e-14]))
    assert r == 2 and gap > 1e10
    assert numerical_rank(np.zeros((0, 3))) == (0, np.inf)


def test_directional_derivative_is_second_order(rng):
    g = GridSpec.torus(16)
    basis = FieldBasis(g, np.eye(256))
    p = random_configuration(g, rng)
    X = random_tangent(g, rng)
    lin = image_to_vector(basis, *apply_d2(p, X))
    r0 = image_to_vector(basis, *raw_residuals(p))
    errs = [np.linalg.norm(image_to_vector(basis, *raw_residuals(displace(p, X, e))) - r0 - e * lin) for e in (1e-3, 5e-4)]
    assert np.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.05)


@pytest.mark.parametrize("d", [-2, 0, 1, 3])
def test_lattice_index_equals_degree(d):
    rep = riemann_roch_index(d, GridSpec.torus(8))
    assert rep.index == d and rep.reliable


def test_lattice_index_needs_torus():
    with pytest.raises(ValueError):
        riemann_roch_index(1, GridSpec.patch(16))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 20), st.integers(-20, 20))
def test_dimension_formula_relations(g, c1):
    full = dimension_formula(g, c1, "full")
    assert full == 2 * g + 2 * c1 + 2
    assert dimension_formula(g, c1, "phi0_bothspinors") == full - 2 * g
    assert 2 * dimension_formula(g, c1, "phi0_psi1zero") == full


def test_dimension_formula_validation():
    with pytest.raises(ValueError):
        dimension_formula(-1, 0, "full")
    with pytest.raises(ValueError):
        dimension_formula(1, 0, "other")


def test_zero_tangent(torus8):
    Z = TangentVector.zeros(torus8)
    A, B, C = apply_d2(Configuration.flat(torus8), Z)
    assert not np.any(A.coeff) and not np.any(C.psi1)
