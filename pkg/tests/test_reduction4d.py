import numpy as np

from swlab.grid import GridSpec, random_field
from swlab.reduction4d import (
    PAULI_I, PAULI_J, PAULI_K, pauli_check, random_four_d_field, reduce_fields, reduction_discrepancy,
)


def test_modified_pauli_relations():
    rep = pauli_check()
    assert rep["ok"], rep["checks"]
    eye = np.eye(2)
    assert np.array_equal(PAULI_I @ PAULI_I, -eye)
    assert np.array_equal(PAULI_J @ PAULI_J, -eye)
    assert np.array_equal(PAULI_K @ PAULI_K, eye)
    assert np.array_equal(PAULI_I @ PAULI_J, PAULI_K)


def test_reduced_fields_satisfy_four_d_equations_identically(rng):
    g = GridSpec.torus(32)
    for _ in range(5):
        assert reduction_discrepancy(random_four_d_field(g, rng)) < 1e-12


def test_injected_third_coordinate_dependence_is_detected(rng):
    g = GridSpec.torus(16)
    f4 = random_four_d_field(g, rng)
    f4.extra_d3 = {"psi1": random_field(g, rng)}
    assert reduction_discrepancy(f4) > 1e-6


def test_higgs_field_comes_from_third_and_fourth_potentials(rng):
    g = GridSpec.torus(16)
    f4 = random_four_d_field(g, rng)
    A, psi, phi = reduce_fields(f4)
    assert phi.form.reality_defect() < 1e-15
    assert A.potential.reality_defect() < 1e-15
    assert psi.psi1 is not None
