"""Metric, almost-complex structure and symplectic forms on the configuration
space, the gauge moment map as a Hamiltonian, and numerical probes of the
orbit-orthogonality property and of the nondegeneracy of the weighted form.

All pairings are integrals over the domain; the spinor pairing is
``<beta, eta>_H = beta1 H conj(eta1) + beta2bar H conj(eta2bar)``, i.e. the
stored components of the second variation are conjugated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauge import SpinorPair, gauge_act
from .grid import TwoForm, hodge_star, integrate_two_form, wedge
from .linearization import (
    FieldBasis,
    TangentVector,
    apply_d1,
    apply_d2,
    assemble_complex,
    displace,
    image_to_vector,
    tangent_from_vector,
    tangent_to_vector,
)


def _real(z, what, tol=1e-9):
    z = complex(z)
    if abs(z.imag) > tol * max(1.0, abs(z.real)):
        raise ArithmeticError(f"{what} should be real, got {z}")
    return z.real


def _omega_integral(p, density):
    """``int density * omega`` for a scalar density."""
    return integrate_two_form(TwoForm(density * p.metric.omega.coeff), p.grid)


def h_pairing(H, beta, eta):
    return beta.psi1 * H * np.conj(eta.psi1) + beta.psi2bar * H * np.conj(eta.psi2bar)


def acs_apply(X):
    """``(alpha, beta, gamma) -> (*alpha, i beta, *gamma)``."""
    return TangentVector(hodge_star(X.alpha), X.beta.scaled(1j), hodge_star(X.gamma))


def metric_g(p, X, Y):
    g = p.grid
    val = (
        integrate_two_form(wedge(hodge_star(X.alpha), Y.alpha), g)
        + _omega_integral(p, h_pairing(p.H, X.beta, Y.beta).real)
        + integrate_two_form(wedge(hodge_star(X.gamma), Y.gamma), g)
    )
    return _real(val, "g(X, Y)")


def omega(p, X, Y):
    g = p.grid
    val = (
        -integrate_two_form(wedge(X.alpha, Y.alpha), g)
        + _omega_integral(p, h_pairing(p.H, X.beta.scaled(1j), Y.beta).real)
        - integrate_two_form(wedge(X.gamma, Y.gamma), g)
    )
    return _real(val, "Omega(X, Y)")


@dataclass
class Psi0Reference:
    psi0: np.ndarray
    zero_set: list

    @classmethod
    def from_field(cls, psi0, tol=1e-14):
        psi0 = np.asarray(psi0, dtype=complex)
        zeros = [tuple(int(i) for i in ij) for ij in np.argwhere(np.abs(psi0) < tol)]
        return cls(psi0, zeros)

    @classmethod
    def single_zero(cls, grid, node=None):
        """A section vanishing at exactly one node.

        On the torus ``(1 - cos(x - x0)) + i (1 - cos(y - y0))`` is periodic
        and vanishes only at ``(x0, y0)``; on the patch ``z - z0`` is used.
        """
        i, j = node if node is not None else (grid.nx // 3, grid.ny // 3)
        x0, y0 = grid.x[i, j], grid.y[i, j]
        if grid.is_torus:
            f = (1 - np.cos(grid.x - x0)) + 1j * (1 - np.cos(grid.y - y0))
        else:
            f = grid.z - (x0 + 1j * y0)
        f = np.asarray(f, dtype=complex)
        f[i, j] = 0.0
        return cls.from_field(f)


def omega_psi0(p, psi0, X, Y):
    """Symplectic form with the spinor term weighted by ``|psi0|_H^2``."""
    g = p.grid
    H = p.H
    b1, b2bar = X.beta.psi1, X.beta.psi2bar
    e1, e2bar = Y.beta.psi1, Y.beta.psi2bar
    b2, e2 = np.conj(b2bar), np.conj(e2bar)
    bracket = (b1 * H * np.conj(e1) - np.conj(b1) * H * e1) - (b2 * H * np.conj(e2) - b2bar * H * e2)
    weight = H * np.abs(psi0.psi0) ** 2
    val = (
        -integrate_two_form(wedge(X.alpha, Y.alpha), g)
        + _omega_integral(p, 0.5j * bracket * weight)
        - integrate_two_form(wedge(X.gamma, Y.gamma), g)
    )
    return _real(val, "Omega_psi0(X, Y)")


def hamiltonian_h_zeta(p, zeta):
    """``int zeta . mu``; real because both factors are imaginary."""
    from .equations import moment_map

    mu = moment_map(p)
    return _real(integrate_two_form(TwoForm(np.asarray(zeta) * mu.coeff), p.grid), "H_zeta")


def hamiltonian_check(p, zeta, X, eps=0.1):
    """Central-difference derivative of ``H_zeta`` along ``X`` against ``Omega(X_zeta, X)``.

    ``H_zeta`` is quadratic in the fields, so the central difference has no
    truncation error and a large step only shrinks the rounding error.
    """
    dh = (hamiltonian_h_zeta(displace(p, X, eps), zeta) - hamiltonian_h_zeta(displace(p, X, -eps), zeta)) / (2 * eps)
    rhs = omega(p, apply_d1(p, zeta), X)
    return dh, rhs


def push_forward(gt, X):
    """``u_* = (Id, u^{-1}, Id)``."""
    uinv = np.exp(-gt.zeta)
    return TangentVector(X.alpha, SpinorPair(X.beta.psi1 * uinv, X.beta.psi2bar * uinv), X.gamma)


def gauge_transform_config(p, gt):
    A, psi, phi = gauge_act(gt, p.A, p.psi, p.phi, p.grid)
    return p.with_(A=A, psi=psi, phi=phi)


def closedness_defect(p, X, Y, Z, form=omega, eps=1e-4):
    """Cyclic finite-difference sum ``dOmega(X, Y, Z)`` for constant vector fields."""

    def deriv(V, U, W):
        return (form(displace(p, V, eps), U, W) - form(displace(p, V, -eps), U, W)) / (2 * eps)

    return deriv(X, Y, Z) - deriv(Y, X, Z) + deriv(Z, X, Y)


# ---------------------------------------------------------------------------
# matrix forms on a field basis

def gram_g(p, basis):
    """Matrix of ``g`` on the real tangent coordinates of :mod:`linearization`.

    Built from the closed forms ``int *alpha ^ alpha' = 4 int Re(a conj(a'))``
    and ``int f omega = 2 int f rho^2`` (``dxdy`` integrals).
    """
    M = basis.size
    cell = p.grid.cell_area
    Q = basis.Q
    w = (p.metric.rho**2 * p.H).ravel()
    W = Q.T @ (w[:, None] * Q)
    G = np.zeros((8 * M, 8 * M))
    for k in range(8):
        sl = slice(k * M, (k + 1) * M)
        G[sl, sl] = 4 * cell * np.eye(M) if k in (0, 1, 6, 7) else 2 * cell * W
    return G


def orbit_projector(p, basis, D1=None):
    """``P`` with ``P v`` the g-orthogonal projection of ``v`` off ``range(D1)``."""
    if D1 is None:
        D1 = tangent_to_vector(basis, apply_d1(p, 1j * basis.expand(np.eye(basis.size)))).T
    G = gram_g(p, basis)
    gram = D1.T @ G @ D1
    cond = np.linalg.cond(gram)
    coef = np.linalg.pinv(gram, rcond=1e-12) @ (D1.T @ G)
    return np.eye(G.shape[0]) - D1 @ coef, cond


@dataclass
class OrbitReport:
    orbit_direction_residual: float
    projected_residual: float
    unprojected_residual: float
    orbit_gram_condition: float


def _a_row_norm(p, basis, X):
    A, _, _ = apply_d2(p, X)
    return float(np.linalg.norm(basis.project(A.coeff.real)))


def _image_norm(p, basis, X):
    return float(np.linalg.norm(image_to_vector(basis, *apply_d2(p, X))))


def gauge_orbit_orthogonality(p, rng, basis=None, threshold=1e-8):
    """Numerical check of the orbit-orthogonality property at ``p``.

    The tangent space of solutions is ``ker D2``.  A random element ``X``
    of it generally has an orbit component, so ``I X`` fails the linearized
    moment-map equation; after g-orthogonal projection off the orbit,
    ``I X`` lies in ``ker D2`` again.  Residuals are relative to ``|X|``.
    """
    from scipy.linalg import null_space

    basis = basis or FieldBasis.for_grid(p.grid)
    asm = assemble_complex(p, basis=basis)
    K = null_space(asm.D2, rcond=threshold)
    P, cond = orbit_projector(p, basis, asm.D1)

    zeta_coef = rng.standard_normal(basis.size)
    orbit_res = np.linalg.norm(P @ (asm.D1 @ zeta_coef)) / np.linalg.norm(asm.D1 @ zeta_coef)

    x = K @ rng.standard_normal(K.shape[1])
    # make sure the negative control has a sizable orbit component
    x = x + asm.D1 @ rng.standard_normal(basis.size) * np.linalg.norm(x) / np.sqrt(basis.size)
    X = tangent_from_vector(basis, x)
    Xp = tangent_from_vector(basis, P @ x)
    nx = np.linalg.norm(x)
    proj_res = _image_norm(p, basis, acs_apply(Xp)) / nx
    unproj_res = _a_row_norm(p, basis, acs_apply(X)) / nx
    return OrbitReport(float(orbit_res), float(proj_res), float(unproj_res), float(cond))


def nondegeneracy_probe(p, psi0, rng, n_vectors=10, basis=None):
    """Skew Gram matrix of ``Omega_psi0`` on random orbit-orthogonal tangents.

    Returns the singular values of the Gram matrix (descending).
    """
    basis = basis or FieldBasis.for_grid(p.grid)
    P, _ = orbit_projector(p, basis)
    vecs = P @ rng.standard_normal((8 * basis.size, n_vectors))
    tangents = [tangent_from_vector(basis, vecs[:, k]) for k in range(n_vectors)]
    gram = np.array([[omega_psi0(p, psi0, X, Y) for Y in tangents] for X in tangents])
    return np.linalg.svd(gram, compute_uv=False), gram
