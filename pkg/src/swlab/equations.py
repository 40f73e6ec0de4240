"""Residuals of the reduced equations on a surface, the moment map, the
curvature of a conformal metric and the closed-form hyperbolic patch family.

The Dirac-type equation is compared coefficientwise against ``dzbar``: row 1
is ``(dbar + A01) psi1 + (1/2) phibar psi2bar`` and row 2 is
``-(1/2) phibar psi1 + (dbar + A01) psi2bar``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauge import Connection, HiggsField, SpinorPair, covariant_dbar, curvature
from .grid import MetricData, OneForm, TwoForm, derivative, l2_norm, laplacian, sup_norm


@dataclass
class Configuration:
    grid: object
    A: Connection
    psi: SpinorPair
    phi: HiggsField
    metric: MetricData
    H: np.ndarray

    def __post_init__(self):
        self.H = np.broadcast_to(np.asarray(self.H, dtype=float), self.grid.shape).copy()
        if np.any(self.H <= 0):
            raise ValueError("Hermitian metric must be positive")

    @classmethod
    def flat(cls, grid, psi=None, phi=None):
        zero = np.zeros(grid.shape, dtype=complex)
        return cls(
            grid,
            Connection.flat(grid),
            psi if psi is not None else SpinorPair(zero, zero.copy()),
            phi if phi is not None else HiggsField(zero.copy()),
            MetricData.flat(grid),
            np.ones(grid.shape),
        )

    def with_(self, **kw):
        fields = dict(grid=self.grid, A=self.A, psi=self.psi, phi=self.phi, metric=self.metric, H=self.H)
        fields.update(kw)
        return Configuration(**fields)


@dataclass
class ResidualReport:
    """Sup and L2 norms of each equation's residual (interior nodes only)."""

    curvature: tuple
    higgs: tuple
    dirac: tuple  # ((sup, l2) row 1, (sup, l2) row 2)

    @property
    def max_sup(self):
        return max(self.curvature[0], self.higgs[0], self.dirac[0][0], self.dirac[1][0])

    @property
    def combined_l2(self):
        """L2 norm of the curvature and Dirac-type residuals taken together."""
        return float(np.sqrt(self.curvature[1] ** 2 + self.dirac[0][1] ** 2 + self.dirac[1][1] ** 2))

    def as_dict(self):
        return {
            "curvature_sup": self.curvature[0], "curvature_l2": self.curvature[1],
            "higgs_sup": self.higgs[0], "higgs_l2": self.higgs[1],
            "dirac_sup": max(self.dirac[0][0], self.dirac[1][0]),
            "dirac_l2": float(np.hypot(self.dirac[0][1], self.dirac[1][1])),
        }


def dirac_residual(A, psi, phi, grid):
    half_pb = 0.5 * phi.phibar
    row1 = covariant_dbar(A, psi.psi1, grid) + half_pb * psi.psi2bar
    row2 = -half_pb * psi.psi1 + covariant_dbar(A, psi.psi2bar, grid)
    return row1, row2


def moment_map(c):
    """``F(A) - (i/2)(|psi1|_H^2 + |psi2|_H^2) omega``; the curvature equation is ``mu = 0``."""
    F = curvature(c.A, c.grid)
    return F - c.metric.omega * (0.5j * c.psi.norm2_h(c.H))


def higgs_residual(c):
    """Coefficient of ``d(Phi01)`` against ``dz^dzbar``."""
    return TwoForm(derivative(c.phi.form.p01, c.grid, "z"))


def residuals(c):
    g = c.grid
    norms = lambda f: (sup_norm(f, g), l2_norm(f, g))
    mu = moment_map(c).coeff
    dphi = higgs_residual(c).coeff
    row1, row2 = dirac_residual(c.A, c.psi, c.phi, g)
    return ResidualReport(norms(mu), norms(dphi), (norms(row1), norms(row2)))


def curvature_k(metric, grid):
    """``K(rho) = -(2/rho^2) d_z d_zbar log rho`` for ``rho = e^sigma h``."""
    rho = metric.rho
    return -laplacian(np.log(rho), grid).real / (2 * rho**2)


def metric_connection(metric, grid):
    """``A = d log rho - dbar log rho``, whose curvature is ``K rho^2 dz^dzbar``."""
    lr = np.log(metric.rho) + 0j
    p10 = derivative(lr, grid, "z")
    return Connection(potential=OneForm(p10, -derivative(lr, grid, "zbar"), "unitary_connection"))


def hyperbolic_h(grid):
    """Poincare disk factor ``2 / (1 - |z|^2)``."""
    return 2.0 / (1.0 - np.abs(grid.z) ** 2)


def hyperbolic_patch_config(f, g, sigma, grid, holo_tol=1e-6):
    """Closed-form solution family on a hyperbolic patch.

    With ``rho = e^sigma h``: ``A = d log rho - dbar log rho``,
    ``psi1 = e^f rho``, ``psi2bar = e^g rho``, ``Phi = 0`` and
    ``H = rho^{-2}``.  Then ``(dbar + A01) psi = e^f (dbar rho - rho dbar log rho)
    = 0`` for holomorphic ``f``, ``|psi1|_H = |e^f|`` and the curvature equation
    becomes ``K(rho) = -(|e^f|^2 + |e^g|^2) / 2``.
    """
    if grid.is_torus:
        raise ValueError("the hyperbolic family lives on a disk patch")
    f = np.broadcast_to(np.asarray(f, dtype=complex), grid.shape)
    g = np.broadcast_to(np.asarray(g, dtype=complex), grid.shape)
    for name, fun in (("f", f), ("g", g)):
        defect = sup_norm(derivative(fun, grid, "zbar"), grid)
        if defect > holo_tol * max(1.0, sup_norm(fun, grid)):
            raise ValueError(f"{name} is not holomorphic (dbar defect {defect:.3g})")
    metric = MetricData(hyperbolic_h(grid), np.broadcast_to(np.asarray(sigma, dtype=float), grid.shape))
    rho = metric.rho
    A = metric_connection(metric, grid)
    psi = SpinorPair(np.exp(f) * rho, np.exp(g) * rho)
    phi = HiggsField(np.zeros(grid.shape, dtype=complex))
    return Configuration(grid, A, psi, phi, metric, rho**-2)


CALIBRATION_CONSTANT = -0.5 * np.log(2.0)
"""``f = g = c`` with ``|e^c|^2 = 1/2`` balances ``K = -1/2`` on the Poincare disk."""


def random_configuration(grid, rng, general_h=True, metric=True):
    """Smooth random data (not a solution) for algebraic checks."""
    from .grid import random_field

    f = lambda **kw: random_field(grid, rng, **kw)
    A = Connection(potential=OneForm.imaginary(f(), "unitary_connection"))
    psi = SpinorPair(f(), f())
    phi = HiggsField(f())
    if metric:
        md = MetricData(np.exp(0.2 * f(real=True)), 0.1 * f(real=True))
    else:
        md = MetricData.flat(grid)
    H = np.exp(0.3 * f(real=True)) if general_h else np.ones(grid.shape)
    return Configuration(grid, A, psi, phi, md, H)


def constant_solution(grid, phi, psi1, psi2bar=None, h=1.0, sigma=0.0, H=1.0):
    """Constant-coefficient zero of the Dirac-type and Higgs equations.

    For ``phi != 0`` the connection is ``A01 = i conj(phi) / 2`` and
    ``psi2bar = -i psi1``; for ``phi = 0`` the connection is trivial and
    ``psi2bar`` is free.  The curvature equation is not imposed.
    """
    ones = np.ones(grid.shape)
    if phi != 0:
        a01 = 0.5j * np.conj(phi)
        psi2bar = -1j * psi1
    else:
        a01 = 0.0
        psi2bar = psi1 if psi2bar is None else psi2bar
    A = Connection(potential=OneForm.imaginary(-np.conj(a01) * ones + 0j, "unitary_connection"))
    return Configuration(
        grid, A, SpinorPair(psi1 * ones + 0j, psi2bar * ones + 0j), HiggsField(phi * ones + 0j),
        MetricData(h * ones, sigma * ones), H * ones,
    )
