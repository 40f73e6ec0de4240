"""Curvature functionals of the determinant line bundles built from the
spinor-dependent one-forms ``B``, ``b``, ``c`` and the prequantization
identities relating their sums to the weighted symplectic form.

Every curvature is the finite formula ``-(i/2pi) int a1 ^ a2`` applied to the
relevant combination of one-forms, so all values are ``i`` times a real
number; they are returned as complex numbers.  ``theta = e^sigma h dz``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import OneForm, integrate_two_form, wedge
from .symplectic import acs_apply, omega_psi0

PREFACTOR = -1j / (2 * np.pi)


def _unitary_form(p, psi0, first, second_bar, sign):
    """``(conj(first) -/+ conj(second_bar)) H psi0 theta
    + (+/- second_bar - first) H conj(psi0) thetabar``."""
    H, rho, s0 = p.H, p.metric.rho, psi0.psi0
    p10 = (np.conj(first) - sign * np.conj(second_bar)) * H * s0 * rho
    p01 = (sign * second_bar - first) * H * np.conj(s0) * rho
    return OneForm(p10, p01, "unitary")


@dataclass
class BFormSet:
    B_plus: OneForm
    B_minus: OneForm

    def unitarity_defect(self):
        return max(self.B_plus.reality_defect(), self.B_minus.reality_defect())


@dataclass
class TangentBForms:
    b_plus: OneForm
    b_minus: OneForm
    c_plus: OneForm
    c_minus: OneForm

    def unitarity_defect(self):
        return max(f.reality_defect() for f in (self.b_plus, self.b_minus, self.c_plus, self.c_minus))


def make_b_forms(p, psi0, X, Y):
    B = BFormSet(
        _unitary_form(p, psi0, p.psi.psi1, p.psi.psi2bar, +1),
        _unitary_form(p, psi0, p.psi.psi1, p.psi.psi2bar, -1),
    )
    bc = TangentBForms(
        _unitary_form(p, psi0, X.beta.psi1, X.beta.psi2bar, +1),
        _unitary_form(p, psi0, X.beta.psi1, X.beta.psi2bar, -1),
        _unitary_form(p, psi0, Y.beta.psi1, Y.beta.psi2bar, +1),
        _unitary_form(p, psi0, Y.beta.psi1, Y.beta.psi2bar, -1),
    )
    return B, bc


def quillen_curvature(a1, a2, grid, scale=1.0):
    """``-(i/2pi) int (scale a1) ^ (scale a2)``."""
    return complex(PREFACTOR * scale**2 * integrate_two_form(wedge(a1, a2), grid))


def _int(a, b, grid):
    return complex(integrate_two_form(wedge(a, b), grid))


@dataclass
class CurvatureSum:
    value: complex
    closed_form: complex
    cross_residual: float
    cross_scale: float
    terms: dict


def curvature_sum_P(p, psi0, X, Y):
    """``F(L1+) + F(L1-) + F(L2+) + F(L2-)`` with the ``1/sqrt(4)`` normalization."""
    g = p.grid
    _, bc = make_b_forms(p, psi0, X, Y)
    a1, a2 = X.alpha, Y.alpha
    terms = {}
    for name, b, c in (("L1", bc.b_plus, bc.c_plus), ("L2", bc.b_minus, bc.c_minus)):
        for sgn, tag in ((1.0, "+"), (-1.0, "-")):
            terms[name + tag] = quillen_curvature(a1 + b * sgn, a2 + c * sgn, g, scale=0.5)
    value = sum(terms.values())
    aa = _int(a1, a2, g)
    bcsum = _int(bc.b_plus, bc.c_plus, g) + _int(bc.b_minus, bc.c_minus, g)
    closed = PREFACTOR * (aa + 0.5 * bcsum)
    # the +/- pairs must cancel the terms linear in b and c
    cross = [
        _int(bc.b_plus, a2, g) + _int(a1, bc.c_plus, g),
        _int(bc.b_minus, a2, g) + _int(a1, bc.c_minus, g),
    ]
    paired = [
        terms["L1+"] + terms["L1-"] - PREFACTOR * 0.25 * 2 * (aa + _int(bc.b_plus, bc.c_plus, g)),
        terms["L2+"] + terms["L2-"] - PREFACTOR * 0.25 * 2 * (aa + _int(bc.b_minus, bc.c_minus, g)),
    ]
    scale = max(abs(PREFACTOR * 0.25 * c) for c in cross)
    return CurvatureSum(complex(value), complex(closed), float(max(abs(v) for v in paired)), float(scale), terms)


def curvature_sum_M(p, X, Y):
    """``F(M+) + F(M-)`` with ``alpha / sqrt(2) +/- gamma``."""
    g = p.grid
    a1, a2, c1, c2 = X.alpha, Y.alpha, X.gamma, Y.gamma
    r = 1 / np.sqrt(2.0)
    terms = {
        "M+": quillen_curvature(a1 * r + c1, a2 * r + c2, g),
        "M-": quillen_curvature(a1 * r - c1, a2 * r - c2, g),
    }
    closed = PREFACTOR * (_int(a1, a2, g) + 2 * _int(c1, c2, g))
    cross = abs(PREFACTOR * r * (_int(a1, c2, g) + _int(c1, a2, g)))
    paired = abs(terms["M+"] + terms["M-"] - closed)
    return CurvatureSum(complex(sum(terms.values())), complex(closed), float(paired), float(cross), terms)


def curvature_T(p, psi0, X, Y):
    _, bc = make_b_forms(p, psi0, X, Y)
    g = p.grid
    return quillen_curvature(bc.b_plus, bc.c_plus, g) + quillen_curvature(bc.b_minus, bc.c_minus, g)


def curvature_S(p, X, Y):
    g = p.grid
    a1, a2, c1, c2 = X.alpha, Y.alpha, X.gamma, Y.gamma
    return 2 * (quillen_curvature(a1 + c1, a2 + c2, g) + quillen_curvature(a1 - c1, a2 - c2, g))


def rel_err(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), 1e-30)


@dataclass
class IdentityReport:
    theorem: str
    lhs: complex
    rhs: complex
    rel_err: float
    H_mode: str
    extras: dict

    def as_dict(self):
        return {
            "theorem": self.theorem,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "rel_err": self.rel_err,
            "H_mode": self.H_mode,
            **self.extras,
        }


def _h_mode(p):
    return "unit" if np.all(p.H == 1.0) else "general"


def identity_pm(p, psi0, X, Y):
    """``F_P + F_M`` against ``(i/pi) Omega_psi0``."""
    P = curvature_sum_P(p, psi0, X, Y)
    M = curvature_sum_M(p, X, Y)
    lhs = P.value + M.value
    rhs = (1j / np.pi) * omega_psi0(p, psi0, X, Y)
    extras = {
        "cross_P": P.cross_residual / max(P.cross_scale, 1e-300),
        "cross_M": M.cross_residual / max(M.cross_scale, 1e-300),
        "P_closed_form_err": rel_err(P.value, P.closed_form),
    }
    return IdentityReport("P+M", lhs, rhs, rel_err(lhs, rhs), _h_mode(p), extras)


def identity_ts(p, psi0, X, Y):
    """``F_T + F_S`` against ``(2i/pi) Omega_psi0``."""
    T = curvature_T(p, psi0, X, Y)
    S = curvature_S(p, X, Y)
    lhs = T + S
    rhs = (2j / np.pi) * omega_psi0(p, psi0, X, Y)
    g = p.grid
    s_display = PREFACTOR * 4 * (_int(X.alpha, Y.alpha, g) + _int(X.gamma, Y.gamma, g))
    extras = {"F_T": [T.real, T.imag], "F_S": [S.real, S.imag], "S_display_err": rel_err(S, s_display)}
    return IdentityReport("T+S", lhs, rhs, rel_err(lhs, rhs), _h_mode(p), extras)


def bc_nodewise_identity(p, psi0, X, Y):
    """Largest nodewise gap between ``b+ ^ c+ + b- ^ c-`` and
    ``-2i [bracket] |psi0|_H^2 omega``, relative to the largest term."""
    _, bc = make_b_forms(p, psi0, X, Y)
    H = p.H
    lhs = wedge(bc.b_plus, bc.c_plus).coeff + wedge(bc.b_minus, bc.c_minus).coeff
    b1, b2bar, e1, e2bar = X.beta.psi1, X.beta.psi2bar, Y.beta.psi1, Y.beta.psi2bar
    b2, e2 = np.conj(b2bar), np.conj(e2bar)
    bracket = (b1 * H * np.conj(e1) - np.conj(b1) * H * e1) - (b2 * H * np.conj(e2) - b2bar * H * e2)
    rhs = -2j * bracket * H * np.abs(psi0.psi0) ** 2 * p.metric.omega.coeff
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(lhs)), 1e-300))


CURVATURE_FUNCTIONALS = {
    "P": lambda p, s, X, Y: curvature_sum_P(p, s, X, Y).value,
    "M": lambda p, s, X, Y: curvature_sum_M(p, X, Y).value,
    "T": curvature_T,
    "S": lambda p, s, X, Y: curvature_S(p, X, Y),
}


def acs_compatibility(p, psi0, X, Y):
    """``max |F(IX, IY) - F(X, Y)| / |F(X, Y)|`` over the curvature functionals."""
    IX, IY = acs_apply(X), acs_apply(Y)
    worst = 0.0
    for f in CURVATURE_FUNCTIONALS.values():
        a, b = f(p, psi0, X, Y), f(p, psi0, IX, IY)
        worst = max(worst, rel_err(a, b))
    return worst
