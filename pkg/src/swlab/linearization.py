"""The deformation complex at a configuration: the gauge map ``d1``, the
linearized equations ``d2``, their matrices over real degrees of freedom,
cohomology dimensions by singular-value counting, dimension formulas, and a
lattice index for the covariant dbar operator on a degree-``d`` torus bundle.

Real degrees of freedom
    ``zeta`` (purely imaginary) contributes one real number per basis
    function.  A tangent vector ``(alpha, beta, gamma)`` contributes eight:
    ``alpha = a dz - conj(a) dzbar`` and ``gamma = c dz - conj(c) dzbar`` give
    the real and imaginary parts of ``a`` and ``c``, and the spinor variation
    gives those of ``beta1`` and ``beta2bar``.  The image of ``d2`` has seven
    (``A`` real, ``B`` complex, ``C`` two complex); with ``reading="literal"``
    the ``A`` coefficient is complex and the image has eight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .gauge import SpinorPair, covariant_dbar, make_uniform_flux_links
from .grid import OneForm, TwoForm, bandlimited_basis, d0, derivative, exterior_d

READINGS = ("re", "literal")
TANGENT_COMPONENTS = ("a.re", "a.im", "beta1.re", "beta1.im", "beta2bar.re", "beta2bar.im", "c.re", "c.im")
SUBCOMPLEXES = {
    # tangent component slots, image component names, whether zeta enters
    "full": (range(8), None, True),
    "alpha": ((0, 1), ("A.re",), True),
    "gamma": ((6, 7), ("B.re", "B.im"), False),
    "beta": ((2, 3, 4, 5), ("C1.re", "C1.im", "C2.re", "C2.im"), False),
}


@dataclass
class TangentVector:
    alpha: OneForm
    beta: SpinorPair
    gamma: OneForm

    @classmethod
    def from_coefficients(cls, a, b1, b2bar, c):
        return cls(OneForm.imaginary(a), SpinorPair(np.asarray(b1, complex), np.asarray(b2bar, complex)), OneForm.imaginary(c, "higgs"))

    @classmethod
    def zeros(cls, grid):
        z = np.zeros(grid.shape, dtype=complex)
        return cls.from_coefficients(z, z, z, z)

    def __add__(self, other):
        return TangentVector(
            self.alpha + other.alpha,
            SpinorPair(self.beta.psi1 + other.beta.psi1, self.beta.psi2bar + other.beta.psi2bar),
            self.gamma + other.gamma,
        )

    def __mul__(self, s):
        s = float(s)
        return TangentVector(self.alpha * s, self.beta.scaled(s), self.gamma * s)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1.0

    def reality_defect(self):
        return max(self.alpha.reality_defect(), self.gamma.reality_defect())


def random_tangent(grid, rng, amplitude=1.0):
    from .grid import random_field

    f = lambda: random_field(grid, rng, amplitude=amplitude)
    return TangentVector.from_coefficients(f(), f(), f(), f())


def displace(p, X, eps):
    """The configuration ``p + eps X`` (connection, spinor and Higgs field moved)."""
    from .gauge import Connection, HiggsField

    pot = p.A.potential + X.alpha * eps
    A = Connection(potential=OneForm(pot.p10, pot.p01, "unitary_connection"))
    psi = SpinorPair(p.psi.psi1 + eps * X.beta.psi1, p.psi.psi2bar + eps * X.beta.psi2bar)
    phi = HiggsField(p.phi.phi + eps * X.gamma.p10)
    return p.with_(A=A, psi=psi, phi=phi)


# ---------------------------------------------------------------------------
# operators

def apply_d1(p, zeta, t=1.0):
    """``zeta -> (d zeta, -t zeta Psi, 0)``."""
    zeta = np.asarray(zeta, dtype=complex)
    alpha = d0(zeta, p.grid, "imaginary_valued")
    beta = SpinorPair(-t * zeta * p.psi.psi1, -t * zeta * p.psi.psi2bar)
    z = np.zeros(np.broadcast_shapes(zeta.shape, p.grid.shape), dtype=complex)
    return TangentVector(alpha, beta, OneForm(z, z.copy(), "higgs"))


def spinor_pairing(p, beta, real_part=True):
    """``<psi1, beta1>_H + <psi2, beta2>_H`` (its real part by default)."""
    # psi2 H conj(beta2) = conj(psi2bar) H beta2bar
    val = p.H * (p.psi.psi1 * np.conj(beta.psi1) + np.conj(p.psi.psi2bar) * beta.psi2bar)
    return val.real if real_part else val


def apply_d2(p, X, t=1.0, reading="re"):
    """Linearized residuals ``(A, B, C)`` of the three equations at ``p``.

    ``A = d alpha - i t [pairing] omega``; the ``re`` reading uses the real
    part of the spinor pairing (the derivative of the moment map), the
    ``literal`` one the complex pairing.  ``C`` is the derivative of the
    Dirac-type operator, where a variation ``gamma`` of the Higgs field moves
    ``phibar`` by ``-gamma01``.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    g = p.grid
    pair = spinor_pairing(p, X.beta, real_part=(reading == "re"))
    A = exterior_d(X.alpha, g) - p.metric.omega * (1j * t * pair)
    B = TwoForm(derivative(X.gamma.p01, g, "z"))
    half_pb = 0.5 * t * p.phi.phibar
    dphibar = -X.gamma.p01
    b1, b2 = X.beta.psi1, X.beta.psi2bar
    a01 = X.alpha.p01
    row1 = covariant_dbar(p.A, b1, g) + half_pb * b2 + t * (a01 * p.psi.psi1 + 0.5 * dphibar * p.psi.psi2bar)
    row2 = -half_pb * b1 + covariant_dbar(p.A, b2, g) + t * (-0.5 * dphibar * p.psi.psi1 + a01 * p.psi.psi2bar)
    return A, B, SpinorPair(row1, row2)


def raw_residuals(p):
    """Nodal residual fields ``(moment map, d Phi01, Dirac rows)``."""
    from .equations import dirac_residual, higgs_residual, moment_map

    row1, row2 = dirac_residual(p.A, p.psi, p.phi, p.grid)
    return moment_map(p), higgs_residual(p), SpinorPair(row1, row2)


# ---------------------------------------------------------------------------
# matrices

@dataclass
class FieldBasis:
    """Real fields ``Q @ coef``; columns of ``Q`` are orthonormal."""

    grid: object
    Q: np.ndarray

    @classmethod
    def for_grid(cls, grid):
        if grid.is_torus:
            return cls(grid, bandlimited_basis(grid))
        idx = np.flatnonzero(grid.interior.ravel())
        Q = np.zeros((grid.nx * grid.ny, idx.size))
        Q[idx, np.arange(idx.size)] = 1.0
        return cls(grid, Q)

    @property
    def size(self):
        return self.Q.shape[1]

    def expand(self, coef):
        coef = np.asarray(coef)
        return (coef @ self.Q.T).reshape(coef.shape[:-1] + self.grid.shape)

    def project(self, fields):
        fields = np.asarray(fields)
        return fields.reshape(fields.shape[:-2] + (-1,)) @ self.Q


def tangent_from_vector(basis, v):
    """Inverse of :func:`tangent_to_vector`; ``v`` may carry leading batch axes."""
    v = np.asarray(v, dtype=float)
    M = basis.size
    parts = [basis.expand(v[..., k * M:(k + 1) * M]) for k in range(8)]
    cplx = [parts[2 * k] + 1j * parts[2 * k + 1] for k in range(4)]
    return TangentVector.from_coefficients(*cplx)


def tangent_to_vector(basis, X):
    comps = (X.alpha.p10, X.beta.psi1, X.beta.psi2bar, X.gamma.p10)
    out = []
    for c in comps:
        out += [basis.project(c.real), basis.project(c.imag)]
    return np.concatenate(out, axis=-1)


def image_to_vector(basis, A, B, C, reading="re"):
    parts = [A.coeff.real]
    if reading == "literal":
        parts.append(A.coeff.imag)
    for f in (B.coeff, C.psi1, C.psi2bar):
        parts += [f.real, f.imag]
    return np.concatenate([basis.project(f) for f in parts], axis=-1)


def image_component_names(reading="re"):
    names = ["A.re"] + (["A.im"] if reading == "literal" else [])
    return names + ["B.re", "B.im", "C1.re", "C1.im", "C2.re", "C2.im"]


@dataclass
class ComplexAssembly:
    D1: np.ndarray
    D2: np.ndarray
    basis: FieldBasis
    base_point: object
    t: float = 1.0
    reading: str = "re"
    subcomplex: str = "full"

    def complex_defect(self):
        """``||D2 D1|| / (||D2|| ||D1||)`` in the spectral norm."""
        if self.D1.shape[1] == 0:
            return 0.0
        n1, n2 = np.linalg.norm(self.D1, 2), np.linalg.norm(self.D2, 2)
        return float(np.linalg.norm(self.D2 @ self.D1, 2) / max(n1 * n2, 1e-300))


def assemble_complex(p, t=1.0, reading="re", subcomplex="full", basis=None):
    """Dense real matrices of ``d1`` and ``d2`` on the grid's field basis.

    Columns are obtained by applying the operators to every basis field at
    once (leading batch axis).
    """
    if subcomplex not in SUBCOMPLEXES:
        raise ValueError(f"subcomplex must be one of {sorted(SUBCOMPLEXES)}")
    basis = basis or FieldBasis.for_grid(p.grid)
    M = basis.size
    eye = np.eye(M)

    zeta = 1j * basis.expand(eye)
    D1 = tangent_to_vector(basis, apply_d1(p, zeta, t)).T

    cols = np.zeros((8 * M, 8 * M))
    for k in range(8):
        cols[k * M:(k + 1) * M, k * M:(k + 1) * M] = eye
    X = tangent_from_vector(basis, cols)
    D2 = image_to_vector(basis, *apply_d2(p, X, t, reading), reading=reading).T

    slots, outs, with_zeta = SUBCOMPLEXES[subcomplex]
    if subcomplex != "full":
        cidx = np.concatenate([np.arange(k * M, (k + 1) * M) for k in slots])
        names = image_component_names(reading)
        ridx = np.concatenate([np.arange(names.index(n) * M, (names.index(n) + 1) * M) for n in outs])
        D2 = D2[np.ix_(ridx, cidx)]
        D1 = D1[cidx] if with_zeta else np.zeros((cidx.size, 0))
    return ComplexAssembly(D1, D2, basis, p, t, reading, subcomplex)


# ---------------------------------------------------------------------------
# cohomology

GAP_RELIABLE = 1e3


@dataclass
class CohomologyReport:
    h0: int
    h1: int
    h2: int
    rank1: int
    rank2: int
    gap_ratios: dict = field(default_factory=dict)

    @property
    def reliable(self):
        return all(g >= GAP_RELIABLE for g in self.gap_ratios.values())

    @property
    def euler_characteristic(self):
        return self.h0 - self.h1 + self.h2


def numerical_rank(M, rel_threshold=1e-8):
    """Rank and the gap ratio ``s[r-1] / s[r]`` across the threshold."""
    if min(M.shape) == 0:
        return 0, np.inf
    s = sla.svdvals(M)
    if s[0] == 0:
        return 0, np.inf
    r = int(np.sum(s > rel_threshold * s[0]))
    if r == len(s):
        return r, np.inf
    return r, float(s[r - 1] / max(s[r], 1e-300))


def cohomology_dims(asm, svd_threshold=1e-8):
    """``h0 = dim ker D1``, ``h1 = dim ker D2 - rank D1``, ``h2 = dim coker D2``."""
    r1, gap1 = numerical_rank(asm.D1, svd_threshold)
    r2, gap2 = numerical_rank(asm.D2, svd_threshold)
    n0 = asm.D1.shape[1]
    n1 = asm.D2.shape[1]
    n2 = asm.D2.shape[0]
    return CohomologyReport(n0 - r1, (n1 - r2) - r1, n2 - r2, r1, r2, {"D1": gap1, "D2": gap2})


def dimension_formula(g, c1, case):
    if g < 0:
        raise ValueError("genus must be non-negative")
    if case == "full":
        return 2 * g + 2 * c1 + 2
    if case == "phi0_bothspinors":
        return 2 * c1 + 2
    if case == "phi0_psi1zero":
        return g + c1 + 1
    raise ValueError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# lattice index

@dataclass
class IndexReport:
    d: int
    index: int
    n_plus: int
    n_minus: int
    gap_ratio: float

    @property
    def reliable(self):
        return self.gap_ratio >= GAP_RELIABLE


def _shift_matrices(links, grid):
    nx, ny = grid.shape
    idx = np.arange(nx * ny).reshape(nx, ny)
    Tx = np.zeros((nx * ny, nx * ny), dtype=complex)
    Ty = np.zeros_like(Tx)
    Tx[idx.ravel(), np.roll(idx, -1, axis=0).ravel()] = links.ux.ravel()
    Ty[idx.ravel(), np.roll(idx, -1, axis=1).ravel()] = links.uy.ravel()
    return Tx, Ty


def overlap_operator(links, grid, mass=1.0):
    """Overlap Dirac operator built from the Wilson operator on the link field,
    together with the chirality matrix ``gamma5``."""
    Tx, Ty = _shift_matrices(links, grid)
    n = Tx.shape[0]
    eye = np.eye(n)
    Dx = 0.5 * (Tx - Tx.conj().T)
    Dy = 0.5 * (Ty - Ty.conj().T)
    wilson = 0.5 * ((2 * eye - Tx - Tx.conj().T) + (2 * eye - Ty - Ty.conj().T))
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    g5 = np.kron(np.diag([1.0, -1.0]), eye)
    DW = np.kron(sx, Dx) + np.kron(sy, Dy) + np.kron(np.eye(2), wilson)
    H = g5 @ (DW - mass * np.eye(2 * n))
    H = 0.5 * (H + H.conj().T)
    w, v = np.linalg.eigh(H)
    sign_h = (v * np.sign(w)) @ v.conj().T
    return np.eye(2 * n) + g5 @ sign_h, g5


def riemann_roch_index(d, grid, svd_threshold=1e-8):
    """Index of the covariant dbar operator on the degree-``d`` lattice bundle.

    A square discretization of ``dbar_A`` always has index zero, so the
    index is read off the kernel of the overlap operator (Ginsparg-Wilson
    chirality): zero modes with ``gamma5 = +1`` are holomorphic sections and
    those with ``-1`` represent the cokernel.
    """
    if not grid.is_torus:
        raise ValueError("the lattice index is computed on the torus")
    links = make_uniform_flux_links(d, grid)
    D, g5 = overlap_operator(links, grid)
    _, s, vh = sla.svd(D, lapack_driver="gesvd")
    k = int(np.sum(s < svd_threshold * s[0]))
    if k == 0:
        return IndexReport(d, 0, 0, 0, np.inf)
    Q = vh[-k:].conj().T
    chi = np.linalg.eigvalsh(Q.conj().T @ g5 @ Q)
    n_plus = int(np.sum(chi > 0))
    n_minus = k - n_plus
    gap = float(s[-k - 1] / max(s[-k], 1e-300))
    return IndexReport(d, n_plus - n_minus, n_plus, n_minus, gap)
