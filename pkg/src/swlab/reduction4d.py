"""The modified Pauli triple, the 4-D equations on x3,x4-independent data,
and the machine check that they reduce to the 2-D system.

The curvature components follow ``F_jk = i(d_k A_j - d_j A_k)``.  Data are
sampled on a 2-D torus grid; ``d3`` and ``d4`` vanish unless a field set
carries explicit ``extra_d3`` data (used only as a negative control).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gauge import Connection, HiggsField, SpinorPair
from .grid import partial

ID2 = np.eye(2, dtype=complex)
PAULI_I = np.array([[-1j, 0], [0, -1j]])
PAULI_J = np.array([[0, 1], [-1, 0]], dtype=complex)
PAULI_K = np.array([[0, -1j], [1j, 0]])


def pauli_check():
    """Products of the modified triple and whether the expected relations hold.

    ``I^2 = J^2 = -1`` but ``K^2 = +1``, so this is not a quaternion algebra.
    """
    mats = {"I": PAULI_I, "J": PAULI_J, "K": PAULI_K}
    table = {a + b: mats[a] @ mats[b] for a in mats for b in mats}
    expected = {
        "II": -ID2, "JJ": -ID2, "KK": ID2,
        "IJ": PAULI_K, "JK": -PAULI_I,
    }
    checks = {k: bool(np.array_equal(table[k], v)) for k, v in expected.items()}
    checks["not_quaternionic"] = not np.array_equal(table["KK"], -ID2)
    return {"table": table, "checks": checks, "ok": all(checks.values())}


@dataclass
class FourDField:
    """Real potentials ``A1..A4`` and a spinor, all functions of ``(x1, x2)``."""

    grid: object
    A: tuple
    psi: SpinorPair
    # derivative data along x3 for each of (A1, A2, A3, A4, psi1, psi2bar);
    # empty for genuinely reduced data
    extra_d3: dict = field(default_factory=dict)

    @property
    def eta(self):
        p1, p2 = self.psi.psi1, np.conj(self.psi.psi2bar)
        im = np.imag(p1 * p2)
        return (-1j * (np.abs(p1) ** 2 + np.abs(p2) ** 2), -2j * im, -2.0 * im + 0j)


def _d(f4, name, j, value):
    g = f4.grid
    if j == 1:
        return partial(value, g, "x")
    if j == 2:
        return partial(value, g, "y")
    if j == 3:
        return f4.extra_d3.get(name, np.zeros(g.shape))
    return np.zeros(g.shape)


def _F(f4, j, k):
    names = ("A1", "A2", "A3", "A4")
    Aj, Ak = f4.A[j - 1], f4.A[k - 1]
    return 1j * (_d(f4, names[j - 1], k, Aj) - _d(f4, names[k - 1], j, Ak))


def sw_residuals_4d(f4):
    """Residuals of the Dirac equation and of the three curvature equations."""
    spinor = np.stack([f4.psi.psi1, f4.psi.psi2bar])
    names = ("psi1", "psi2bar")

    def nabla(j):
        d = np.stack([_d(f4, names[c], j, spinor[c]) for c in range(2)])
        return d + 1j * f4.A[j - 1] * spinor

    n1, n2, n3, n4 = (nabla(j) for j in range(1, 5))
    mv = lambda M, v: np.einsum("ab,b...->a...", M, v)
    dirac = n1 - mv(PAULI_I, n2) - mv(PAULI_J, n3) - mv(PAULI_K, n4)
    eta1, eta2, eta3 = f4.eta
    r2a = _F(f4, 1, 2) + _F(f4, 3, 4) - 0.5 * eta1
    r2b = _F(f4, 1, 3) + _F(f4, 4, 2) - 0.5 * eta2
    r2c = _F(f4, 1, 4) + _F(f4, 2, 3) - 0.5 * eta3
    return SpinorPair(dirac[0], dirac[1]), r2a, r2b, r2c


def reduce_fields(f4):
    """``A = i(A1 dx + A2 dy)``, ``phibar = phi1 - i phi2`` with ``phi_k = -i A_{k+2}``."""
    A = Connection.from_real_components(f4.A[0], f4.A[1])
    phi1, phi2 = -1j * f4.A[2], -1j * f4.A[3]
    phibar = phi1 - 1j * phi2
    return A, SpinorPair(f4.psi.psi1, f4.psi.psi2bar), HiggsField(np.conj(phibar))


def reduction_discrepancy(f4):
    """Largest nodewise mismatch between the 4-D residuals and the 2-D ones.

    Compared pairs:

    * ``r2b - i r2c`` against ``-2 x coeff(d Phi01)`` (the printed right-hand
      sides cancel in this combination);
    * the 4-D Dirac residual against twice the 2-D Dirac-type operator;
    * ``r2a dx2^dx1`` against ``F(A) + (i/2)|Psi|^2 dx2^dx1``.
    """
    from .equations import dirac_residual
    from .gauge import curvature
    from .grid import derivative

    g = f4.grid
    A, psi, phi = reduce_fields(f4)
    dirac4, r2a, r2b, r2c = sw_residuals_4d(f4)

    d_phi01 = derivative(phi.form.p01, g, "z")
    e1 = np.abs((r2b - 1j * r2c) + 2 * d_phi01)

    row1, row2 = dirac_residual(A, psi, phi, g)
    e2 = np.maximum(np.abs(dirac4.psi1 - 2 * row1), np.abs(dirac4.psi2bar - 2 * row2))

    # dx2^dx1 = -dx^dy = -(i/2) dz^dzbar
    vol21 = -0.5j
    F = curvature(A, g).coeff
    eq1 = F - (-0.5j) * (np.abs(psi.psi1) ** 2 + np.abs(psi.psi2bar) ** 2) * vol21
    e3 = np.abs(eq1 - r2a * vol21)
    return float(max(e1.max(), e2.max(), e3.max()))


def random_four_d_field(grid, rng, cutoff=None):
    from .grid import random_field

    A = tuple(random_field(grid, rng, cutoff, real=True) for _ in range(4))
    psi = SpinorPair(random_field(grid, rng, cutoff), random_field(grid, rng, cutoff))
    return FourDField(grid, A, psi)
