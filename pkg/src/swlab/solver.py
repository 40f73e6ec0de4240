"""Newton solvers on a disk patch: the scalar prescribed-curvature equation
for the conformal factor, and an experimental Gauss-Newton iteration for the
coupled curvature and Dirac-type equations.

Both emit a trace of per-iteration records
``{iter, residual_sup, residual_l2, step_length}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constants import LIOUVILLE_COEFF
from .equations import curvature_k, residuals
from .gauge import Connection, SpinorPair
from .grid import MetricData, OneForm, l2_norm, sup_norm


class NonConvergence(RuntimeError):
    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


class SingularSystem(NonConvergence):
    pass


@dataclass(frozen=True)
class SolverOptions:
    max_iter: int = 50
    residual_tol: float = 1e-10
    backtrack: float = 0.5
    linear_tol: float = 1e-12

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if min(self.residual_tol, self.backtrack, self.linear_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.backtrack >= 1:
            raise ValueError("backtracking factor must lie in (0, 1)")


@dataclass
class Trace:
    records: list = field(default_factory=list)
    converged: bool = False
    flags: list = field(default_factory=list)
    floor: float = 0.0  # estimated roundoff level of the residual

    def add(self, it, sup, l2, step):
        self.records.append({"iter": it, "residual_sup": float(sup), "residual_l2": float(l2), "step_length": float(step)})

    @property
    def residuals(self):
        return [r["residual_sup"] for r in self.records]

    def to_jsonl(self):
        return "".join(json.dumps(r) + "\n" for r in self.records)


def roundoff_floor(h, sigma, grid, factor=10.0):
    """Size of the rounding error in ``K`` evaluated by the five-point stencil.

    Each stencil application cancels terms of size ``|log rho| / dx^2``, so
    ``K`` cannot be resolved below ``~ 4 eps |log rho| / (2 rho^2 dx^2)``.
    """
    rho = np.exp(sigma) * h
    num = 4 * np.finfo(float).eps * np.max(np.abs(np.log(rho))) / min(grid.dx, grid.dy) ** 2
    return factor * num / (2 * np.min(rho) ** 2)


def quadratic_contraction(residuals, constant=10.0, onset=1e-2, floor=1e-13):
    """Worst ``r_{k+1} / r_k^2`` over steps that start below ``onset``.

    Steps landing at the roundoff ``floor`` carry no rate information and
    are skipped.  Returns ``(worst_ratio, n_pairs_checked, ok)``.
    """
    worst, n = 0.0, 0
    for a, b in zip(residuals, residuals[1:]):
        if a < onset and b > floor and a > 0:
            worst = max(worst, b / a**2)
            n += 1
    return worst, n, worst <= constant


# ---------------------------------------------------------------------------
# scalar equation

def _patch_laplacian(grid):
    """Five-point Laplacian on all nodes (rows for margin nodes are unused)."""
    nx, ny = grid.shape
    ex = sp.diags([np.ones(nx - 1), -2 * np.ones(nx), np.ones(nx - 1)], [-1, 0, 1]) / grid.dx**2
    ey = sp.diags([np.ones(ny - 1), -2 * np.ones(ny), np.ones(ny - 1)], [-1, 0, 1]) / grid.dy**2
    return (sp.kron(ex, sp.identity(ny)) + sp.kron(sp.identity(nx), ey)).tocsr()


def solve_liouville(h, c, grid, opts=None, sigma0=None):
    """Solve ``K(e^sigma h) = -c`` on the patch with ``sigma = 0`` on the margin.

    Equivalent to ``lap(sigma) = 2 c h^2 e^{2 sigma} - lap(log h)`` with the
    five-point Laplacian, which is the stencil :func:`curvature_k` uses on
    interior nodes; the reported residual is ``sup |K + c|``.
    """
    opts = opts or SolverOptions()
    if grid.is_torus:
        raise ValueError("the prescribed-curvature solve uses a Dirichlet patch")
    if c < 0:
        raise ValueError("target requires c >= 0")
    h = np.broadcast_to(np.asarray(h, dtype=float), grid.shape)
    if np.any(h <= 0):
        raise ValueError("h must be positive")

    inner = grid.interior.ravel()
    idx = np.flatnonzero(inner)
    L = _patch_laplacian(grid)
    Lii = L[idx][:, idx].tocsc()
    lap_logh = (L @ np.log(h).ravel())[idx]
    h2 = (h**2).ravel()[idx]

    sigma = np.zeros(grid.shape) if sigma0 is None else np.array(sigma0, dtype=float)
    sigma[~grid.interior] = 0.0

    def equation(s_full):
        s = s_full.ravel()
        return (L @ s)[idx] + lap_logh - LIOUVILLE_COEFF * c * h2 * np.exp(2 * s[idx])

    def measure(s_full):
        r = curvature_k(MetricData(h, s_full), grid) + c
        return sup_norm(r, grid), l2_norm(r, grid)

    trace = Trace()
    target = opts.residual_tol * (1 + c)
    sup, l2 = measure(sigma)
    trace.add(0, sup, l2, 0.0)
    for it in range(1, opts.max_iter + 1):
        if sup <= target:
            trace.converged = True
            trace.floor = roundoff_floor(h, sigma, grid)
            return sigma, trace
        G = equation(sigma)
        J = Lii - sp.diags(2 * LIOUVILLE_COEFF * c * h2 * np.exp(2 * sigma.ravel()[idx]))
        try:
            delta = spla.spsolve(J.tocsc(), -G)
        except RuntimeError as exc:
            raise SingularSystem(f"Newton system is singular: {exc}", trace) from exc
        if not np.all(np.isfinite(delta)):
            raise SingularSystem("Newton system is singular", trace)
        g0 = np.linalg.norm(G)
        step = 1.0
        while True:
            trial = sigma.copy()
            trial.ravel()[idx] += step * delta
            if np.linalg.norm(equation(trial)) <= (1 - 1e-4 * step) * g0 or step < 1e-8:
                break
            step *= opts.backtrack
        sigma = trial
        sup, l2 = measure(sigma)
        trace.add(it, sup, l2, step)
    trace.floor = roundoff_floor(h, sigma, grid)
    if sup <= target:
        trace.converged = True
        return sigma, trace
    raise NonConvergence(f"no convergence after {opts.max_iter} iterations (residual {sup:.3g})", trace)


# ---------------------------------------------------------------------------
# coupled system

# unknown slots per interior node: Re/Im of A10, psi1, psi2bar
_SLOTS = 6
_COLOR = 5  # stencils reach at most two nodes, so a 5x5 coloring separates columns


def _perturbation(grid, slot, values):
    from .linearization import TangentVector

    z = np.zeros(values.shape, dtype=complex)
    unit = 1.0 if slot % 2 == 0 else 1j
    comps = [z, z, z]
    comps[slot // 2] = unit * values
    return TangentVector(OneForm.imaginary(comps[0]), SpinorPair(comps[1], comps[2]), OneForm.imaginary(z, "higgs"))


def _residual_vector(p, idx):
    from .linearization import raw_residuals

    mu, _, rows = raw_residuals(p)
    parts = [mu.coeff.real, rows.psi1.real, rows.psi1.imag, rows.psi2bar.real, rows.psi2bar.imag]
    return np.concatenate([f.ravel()[idx] for f in parts])


def coupled_jacobian(p):
    """Sparse Jacobian of the curvature and Dirac-type residuals at interior nodes with
    respect to the interior unknowns, assembled by column coloring."""
    from .linearization import apply_d2

    g = p.grid
    nx, ny = g.shape
    idx = np.flatnonzero(g.interior.ravel())
    n = idx.size
    pos = -np.ones(nx * ny, dtype=int)
    pos[idx] = np.arange(n)
    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    rows, cols, vals = [], [], []
    for ci in range(_COLOR):
        for cj in range(_COLOR):
            mask = ((I % _COLOR) == ci) & ((J % _COLOR) == cj) & g.interior
            # for every output node, the unique seeded node within reach
            oi = I + ((ci - I + 2) % _COLOR) - 2
            oj = J + ((cj - J + 2) % _COLOR) - 2
            valid = (oi >= 0) & (oi < nx) & (oj >= 0) & (oj < ny)
            src = np.where(valid, np.clip(oi, 0, nx - 1) * ny + np.clip(oj, 0, ny - 1), 0)
            src_pos = np.where(valid, pos[src.ravel()].reshape(nx, ny), -1)
            for slot in range(_SLOTS):
                X = _perturbation(g, slot, mask.astype(float))
                A, _, C = apply_d2(p, X)
                outs = [A.coeff.real, C.psi1.real, C.psi1.imag, C.psi2bar.real, C.psi2bar.imag]
                for r, f in enumerate(outs):
                    fv = f.ravel()[idx]
                    sp_ = src_pos.ravel()[idx]
                    keep = (sp_ >= 0) & (fv != 0)
                    rows.append(r * n + np.flatnonzero(keep))
                    cols.append(slot * n + sp_[keep])
                    vals.append(fv[keep])
    rows, cols, vals = (np.concatenate(a) for a in (rows, cols, vals))
    return sp.csr_matrix((vals, (rows, cols)), shape=(5 * n, _SLOTS * n))


def _unknown_weights(p, idx):
    """Diagonal of the metric ``g`` on the unknowns (Coulomb-type gauge fixing)."""
    cell = p.grid.cell_area
    w_beta = 2 * cell * (p.metric.rho**2 * p.H).ravel()[idx]
    w_a = np.full(idx.size, 4 * cell)
    return np.concatenate([w_a, w_a, w_beta, w_beta, w_beta, w_beta])


def _apply_update(p, idx, delta):
    n = idx.size
    parts = [np.zeros(p.grid.nx * p.grid.ny) for _ in range(_SLOTS)]
    for k in range(_SLOTS):
        parts[k][idx] = delta[k * n:(k + 1) * n]
    sh = p.grid.shape
    da = (parts[0] + 1j * parts[1]).reshape(sh)
    db1 = (parts[2] + 1j * parts[3]).reshape(sh)
    db2 = (parts[4] + 1j * parts[5]).reshape(sh)
    pot = p.A.potential + OneForm.imaginary(da)
    A = Connection(potential=OneForm(pot.p10, pot.p01, "unitary_connection"))
    return p.with_(A=A, psi=SpinorPair(p.psi.psi1 + db1, p.psi.psi2bar + db2))


def newton_coupled(c0, opts=None):
    """Gauss-Newton iteration for the curvature and Dirac-type equations.

    Unknowns are the connection and spinor at interior nodes (margin nodes
    and the Higgs field keep their initial values).  Each step is the
    minimum-norm correction in the metric ``g``, which removes the gauge
    directions from the update.  Returns ``(configuration, trace)``; the
    trace flags nonconvergence, a rank-deficient Jacobian or the degenerate
    branch ``Psi = 0`` instead of raising.
    """
    opts = opts or SolverOptions(max_iter=10, residual_tol=1e-11)
    p = c0
    g = p.grid
    if g.is_torus:
        raise ValueError("the coupled solve runs on a patch")
    idx = np.flatnonzero(g.interior.ravel())
    trace = Trace()
    if sup_norm(p.psi.psi1, g) == 0 and sup_norm(p.psi.psi2bar, g) == 0:
        trace.flags.append("degenerate: Psi vanishes identically")

    def measure(q):
        rep = residuals(q)
        return rep.max_sup, rep.combined_l2

    sup, l2 = measure(p)
    trace.add(0, sup, l2, 0.0)
    winv = 1.0 / _unknown_weights(p, idx)
    for it in range(1, opts.max_iter + 1):
        if l2 <= opts.residual_tol:
            trace.converged = True
            break
        r = _residual_vector(p, idx)
        J = coupled_jacobian(p)
        JW = J @ sp.diags(winv)
        S = (JW @ J.T).tocsc()
        try:
            lam = spla.spsolve(S, -r)
            ok = np.all(np.isfinite(lam)) and np.linalg.norm(S @ lam + r) <= 1e-6 * max(np.linalg.norm(r), 1e-300)
        except RuntimeError:
            ok = False
        if not ok:
            trace.flags.append(f"rank-deficient Jacobian at iteration {it}")
            lam = spla.lsqr(S, -r, atol=opts.linear_tol, btol=opts.linear_tol, iter_lim=10 * S.shape[0])[0]
        delta = winv * (J.T @ lam)
        step = 1.0
        while True:
            trial = _apply_update(p, idx, step * delta)
            tsup, tl2 = measure(trial)
            if tl2 < l2 or step < 1e-6:
                break
            step *= opts.backtrack
        p, sup, l2 = trial, tsup, tl2
        trace.add(it, sup, l2, step)
    else:
        trace.converged = l2 <= opts.residual_tol
    if not trace.converged:
        trace.flags.append(f"nonconvergence: residual {l2:.3g} after {opts.max_iter} iterations")
    return p, trace
