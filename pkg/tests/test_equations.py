import numpy as np
import pytest

from swlab.equations import (
    CALIBRATION_CONSTANT, Configuration, constant_solution, curvature_k, hyperbolic_h, hyperbolic_patch_config,
    moment_map, random_configuration, residuals,
)
from swlab.grid import GridSpec, MetricData, sup_norm


def test_poincare_metric_has_curvature_minus_one_half():
    g = GridSpec.patch(64, r0=0.5)
    K = curvature_k(MetricData(hyperbolic_h(g), np.zeros(g.shape)), g)
    assert sup_norm(K + 0.5, g) < 1e-3


def test_flat_metric_has_zero_curvature(torus16):
    assert np.max(np.abs(curvature_k(MetricData.flat(torus16), torus16))) < 1e-12


def test_calibrated_patch_solution_converges_at_second_order():
    errs = []
    for n in (32, 64, 128):
        rep = residuals(hyperbolic_patch_config(CALIBRATION_CONSTANT, CALIBRATION_CONSTANT, 0.0, GridSpec.patch(n)))
        errs.append(rep.max_sup)
        assert rep.as_dict()["higgs_sup"] == 0.0
    assert errs[-1] < 1e-5
    assert np.polyfit(np.log([1, 0.5, 0.25]), np.log(errs), 1)[0] > 1.9


def test_uncalibrated_constants_leave_a_curvature_residual():
    g = GridSpec.patch(64)
    rep = residuals(hyperbolic_patch_config(0.0, 0.0, 0.0, g))
    # |e^f|^2 + |e^g|^2 = 2 instead of 1
    assert rep.as_dict()["curvature_sup"] > 0.1
    assert rep.as_dict()["dirac_sup"] < 1e-4


def test_hyperbolic_family_rejects_bad_input(torus16, patch32):
    with pytest.raises(ValueError):
        hyperbolic_patch_config(0.0, 0.0, 0.0, torus16)
    with pytest.raises(ValueError):
        hyperbolic_patch_config(np.conj(patch32.z), 0.0, 0.0, patch32)


def test_dirac_residual_vanishes_for_any_holomorphic_pair():
    g = GridSpec.patch(64)
    c = hyperbolic_patch_config(0.3 * g.z**2, np.exp(g.z) * 0.1, 0.0, g)
    assert residuals(c).as_dict()["dirac_sup"] < 1e-4


@pytest.mark.parametrize("phi", [0.7 - 0.2j, 0.0])
def test_constant_solutions_solve_dirac_and_higgs(torus8, phi):
    c = constant_solution(torus8, phi, 0.4 + 0.3j, 1.1j, h=1.3, sigma=0.1, H=0.8)
    d = residuals(c).as_dict()
    assert d["dirac_sup"] < 1e-14 and d["higgs_sup"] < 1e-14


def test_flat_configuration_is_a_trivial_solution(torus16):
    assert residuals(Configuration.flat(torus16)).max_sup == 0.0


def test_moment_map_is_imaginary(torus16, rng):
    mu = moment_map(random_configuration(torus16, rng)).coeff
    assert np.max(np.abs(mu.imag)) < 1e-12


def test_hermitian_metric_must_be_positive(torus8):
    with pytest.raises(ValueError):
        Configuration.flat(torus8).with_(H=-np.ones(torus8.shape))
