import numpy as np
import pytest

from swlab.equations import CALIBRATION_CONSTANT, Configuration, hyperbolic_h, hyperbolic_patch_config, residuals
from swlab.gauge import SpinorPair
from swlab.grid import GridSpec, random_field
from swlab.solver import (
    SolverOptions, coupled_jacobian, newton_coupled, quadratic_contraction, roundoff_floor, solve_liouville,
)


@pytest.fixture(scope="module")
def liouville_run():
    g = GridSpec.patch(64, r0=0.5)
    a = g.half_width
    bump = 0.3 * np.cos(np.pi * g.x / (2 * a)) * np.cos(np.pi * g.y / (2 * a))
    sigma, trace = solve_liouville(hyperbolic_h(g), 0.5, g, sigma0=bump)
    return g, sigma, trace


def test_liouville_recovers_zero_conformal_factor(liouville_run):
    g, sigma, trace = liouville_run
    assert trace.converged
    assert trace.residuals[-1] < 1e-10
    assert np.max(np.abs(sigma)) < 1e-4


def test_liouville_newton_contracts_quadratically(liouville_run):
    _, _, trace = liouville_run
    worst, pairs, ok = quadratic_contraction(trace.residuals, 10.0, 1e-2, trace.floor)
    assert ok and pairs >= 1 and worst <= 10.0


def test_quadratic_contraction_detects_linear_convergence():
    res = [1e-1, 5e-3, 2.5e-3, 1.25e-3, 6e-4]
    assert not quadratic_contraction(res, 10.0, 1e-2, 1e-15)[2]


def test_roundoff_floor_scales_with_grid(liouville_run):
    g, sigma, _ = liouville_run
    coarse = GridSpec.patch(32, r0=0.5)
    f1 = roundoff_floor(hyperbolic_h(g), sigma, g)
    f0 = roundoff_floor(hyperbolic_h(coarse), np.zeros(coarse.shape), coarse)
    assert 2 < f1 / f0 < 8


def test_liouville_trivial_target():
    g = GridSpec.patch(32, r0=0.5)
    sigma, _ = solve_liouville(np.ones(g.shape), 0.0, g, sigma0=0.01 * np.ones(g.shape))
    assert np.max(np.abs(sigma)) < 1e-12


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(max_iter=0)
    with pytest.raises(ValueError):
        SolverOptions(backtrack=1.5)
    with pytest.raises(ValueError):
        SolverOptions(residual_tol=-1)


def test_coupled_jacobian_matches_finite_differences(rng):
    from swlab.solver import _apply_update, _residual_vector

    g = GridSpec.patch(16)
    c = hyperbolic_patch_config(CALIBRATION_CONSTANT, CALIBRATION_CONSTANT, 0.0, g)
    c = c.with_(psi=SpinorPair(c.psi.psi1 + 0.1 * random_field(g, rng), c.psi.psi2bar))
    idx = np.flatnonzero(g.interior.ravel())
    J = coupled_jacobian(c)
    v = rng.standard_normal(J.shape[1])
    eps = 1e-6
    fd = (_residual_vector(_apply_update(c, idx, eps * v), idx) - _residual_vector(_apply_update(c, idx, -eps * v), idx)) / (2 * eps)
    assert np.linalg.norm(fd - J @ v) <= 1e-6 * np.linalg.norm(fd)


def test_coupled_newton_fixed_point_and_perturbation(rng):
    g = GridSpec.patch(24)
    c = hyperbolic_patch_config(CALIBRATION_CONSTANT, CALIBRATION_CONSTANT, 0.0, g)
    q, tr = newton_coupled(c)
    assert tr.converged and len(tr.records) <= 3
    assert residuals(q).combined_l2 == tr.records[-1]["residual_l2"]
    pert = c.with_(psi=SpinorPair(c.psi.psi1 + 1e-3 * random_field(g, rng), c.psi.psi2bar + 1e-3 * random_field(g, rng)))
    _, tr2 = newton_coupled(pert)
    assert tr2.records[-1]["residual_l2"] < 1e-9


def test_coupled_newton_flags_degenerate_branch():
    _, tr = newton_coupled(Configuration.flat(GridSpec.patch(16)))
    assert any(f.startswith("degenerate") for f in tr.flags)


def test_coupled_newton_requires_patch(torus8):
    with pytest.raises(ValueError):
        newton_coupled(Configuration.flat(torus8))
