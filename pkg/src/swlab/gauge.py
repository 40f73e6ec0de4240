"""U(1) connections (smooth potentials and lattice links), curvature, degree,
the covariant dbar operator and the gauge action."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .constants import PLAQUETTE_SIGN
from .grid import DomainMismatch, OneForm, TwoForm, d0, derivative, exterior_d, integrate_two_form


@dataclass
class LinkField:
    """Unit-modulus parallel transporters on the edges ``n -> n+x`` and ``n -> n+y``."""

    ux: np.ndarray
    uy: np.ndarray

    def plaquette_angles(self):
        ux, uy = self.ux, self.uy
        loop = ux * np.roll(uy, -1, axis=-2) * np.conj(np.roll(ux, -1, axis=-1)) * np.conj(uy)
        return np.angle(loop)

    def unitarity_defect(self):
        return float(max(np.max(np.abs(np.abs(self.ux) - 1)), np.max(np.abs(np.abs(self.uy) - 1))))


@dataclass
class Connection:
    """Either a smooth potential (iR-valued OneForm) or a lattice link field."""

    potential: OneForm | None = None
    links: LinkField | None = None

    @classmethod
    def from_real_components(cls, a1, a2):
        """``A = i(A1 dx + A2 dy)``, i.e. ``A10 = (i/2)(A1 - iA2)``."""
        p10 = 0.5j * (a1 - 1j * a2)
        p01 = 0.5j * (a1 + 1j * a2)
        return cls(potential=OneForm(p10 + 0j, p01 + 0j, "unitary_connection"))

    @classmethod
    def flat(cls, grid):
        return cls(potential=OneForm.zeros(grid, "unitary_connection"))

    def real_components(self):
        """Inverse of :meth:`from_real_components`."""
        p10 = self.potential.p10
        # p10 = (i/2)(A1 - i A2)  =>  -2i p10 = A1 - i A2
        w = -2j * p10
        return w.real, -w.imag

    @property
    def a01(self):
        if self.potential is None:
            raise ValueError("lattice connections have no smooth (0,1) coefficient")
        return self.potential.p01


@dataclass
class SpinorPair:
    """``Psi = (psi1, psi2bar)``; both components are sections of L."""

    psi1: np.ndarray
    psi2bar: np.ndarray

    def scaled(self, c):
        return SpinorPair(self.psi1 * c, self.psi2bar * c)

    def norm2_h(self, H):
        """``|psi1|_H^2 + |psi2|_H^2``."""
        return (np.abs(self.psi1) ** 2 + np.abs(self.psi2bar) ** 2) * H


@dataclass
class HiggsField:
    phi: np.ndarray

    @property
    def form(self):
        """``Phi = phi dz - conj(phi) dzbar``."""
        return OneForm.imaginary(self.phi)

    @property
    def phibar(self):
        return np.conj(self.phi)


@dataclass
class GaugeTransform:
    """``u = exp(zeta)`` with ``zeta`` purely imaginary."""

    zeta: np.ndarray

    def __post_init__(self):
        self.zeta = 1j * np.imag(np.asarray(self.zeta, dtype=complex))

    @classmethod
    def from_angle(cls, chi):
        return cls(1j * np.asarray(chi, dtype=float))

    @property
    def u(self):
        return np.exp(self.zeta)

    def compose(self, other):
        return GaugeTransform(self.zeta + other.zeta)


# ---------------------------------------------------------------------------

def curvature(A, grid):
    """``F(A) = dA``; for links, plaquette angles spread over the cell area."""
    if A.potential is not None:
        return exterior_d(A.potential, grid)
    if A.links is not None:
        if not grid.is_torus:
            raise DomainMismatch("link fields live on the torus")
        # plaquette ~ h^2 (d1 A2 - d2 A1) and F coeff = -(1/2)(d1 A2 - d2 A1)
        return TwoForm(-0.5 * A.links.plaquette_angles() / grid.cell_area + 0j)
    raise ValueError("connection has neither a potential nor links")


def chern_number(A, grid):
    """Nearest integer to ``(i/2pi) int F`` and the distance to it."""
    if not grid.is_torus:
        raise DomainMismatch("the degree is defined on the closed torus")
    c = (1j / (2 * np.pi) * integrate_two_form(curvature(A, grid), grid)).real
    d = int(np.rint(c))
    return d, abs(c - d)


def covariant_dbar(A, s, grid):
    """``(dbar + A01) s``; on links, the gauge-covariant central difference."""
    s = grid.check(np.asarray(s))
    if A.potential is not None:
        return derivative(s, grid, "zbar") + A.potential.p01 * s
    if A.links is None:
        raise ValueError("connection has neither a potential nor links")
    ux, uy = A.links.ux, A.links.uy
    dx = (ux * np.roll(s, -1, axis=-2) - np.conj(np.roll(ux, 1, axis=-2)) * np.roll(s, 1, axis=-2)) / (2 * grid.dx)
    dy = (uy * np.roll(s, -1, axis=-1) - np.conj(np.roll(uy, 1, axis=-1)) * np.roll(s, 1, axis=-1)) / (2 * grid.dy)
    return 0.5 * (dx + 1j * dy)


def gauge_act(g, A, psi, phi, grid):
    """``(A, Psi, Phi) -> (A + u^{-1} du, u^{-1} Psi, Phi)``."""
    uinv = np.exp(-g.zeta)
    if A.potential is not None:
        pot = A.potential + d0(g.zeta, grid, "unitary_connection")
        A2 = replace(A, potential=OneForm(pot.p10, pot.p01, "unitary_connection"))
    else:
        u = g.u
        ux = np.conj(u) * A.links.ux * np.roll(u, -1, axis=-2)
        uy = np.conj(u) * A.links.uy * np.roll(u, -1, axis=-1)
        A2 = replace(A, links=LinkField(ux, uy))
    return A2, SpinorPair(psi.psi1 * uinv, psi.psi2bar * uinv), phi


def make_uniform_flux_links(d, grid):
    """Landau-gauge links of degree ``d`` with equal flux through every plaquette."""
    if not grid.is_torus:
        raise DomainMismatch("link fields live on the torus")
    nx, ny = grid.shape
    theta = PLAQUETTE_SIGN * 2 * np.pi * d / (nx * ny)
    i = np.arange(nx)[:, None] * np.ones((1, ny))
    j = np.ones((nx, 1)) * np.arange(ny)[None, :]
    uy = np.exp(1j * theta * i)
    ux = np.ones((nx, ny), dtype=complex)
    ux[-1, :] = np.exp(-1j * theta * nx * j[-1, :])
    return LinkField(ux, uy)


def inner_h(H, s, t):
    """``<s, t>_H = s H conj(t)``."""
    return s * H * np.conj(t)
