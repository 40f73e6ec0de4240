"""Check suites and the records they produce.

A :class:`CheckRecord` compares a computed value with an expected one under
one of four comparisons:

``abs``   pass iff ``abs_err <= tolerance`` (used when the expected value is 0)
``rel``   pass iff ``rel_err <= tolerance``
``ge``    pass iff ``computed >= expected`` (lower bounds; ``abs_err`` is the shortfall)
``le``    pass iff ``computed <= expected`` (upper bounds; ``abs_err`` is the excess)

Records with ``asserted = False`` are measurements; they never fail a run.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

SUITES = ("reduce", "patch", "liouville", "index", "symplectic", "quillen")
# checks whose computed value is itself a wall time
TIMING_CHECKS = ("reduce.runtime_per_100",)
RECORD_FIELDS = (
    "check_id", "suite", "parameters", "computed", "expected", "comparison",
    "tolerance", "abs_err", "rel_err", "pass", "asserted", "wall_time",
)


@dataclass
class RunConfig:
    suites: tuple = SUITES
    grid: int = 32
    matrix_grid: int = 8
    index_grid: int = 16
    patch_grids: tuple = (32, 64, 128)
    patch_r0: float = 0.1
    liouville_grid: int = 64
    liouville_r0: float = 0.5
    seeds: tuple = (1, 2, 3)
    draws: int = 100
    probes: int = 20
    tol: float = 1e-12
    out: str = "swlab_ledger.jsonl"
    snapshot: str | None = None
    h_mode: str = "unit"

    def __post_init__(self):
        self.suites = tuple(self.suites)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.patch_grids = tuple(int(n) for n in self.patch_grids)
        if not self.suites:
            raise ValueError("select at least one suite")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise ValueError(f"unknown suites {bad}; choose from {SUITES}")
        if self.tol <= 0 or self.patch_r0 <= 0 or self.liouville_r0 <= 0:
            raise ValueError("tolerances and radii must be positive")
        if min(self.draws, self.probes, len(self.seeds)) < 1:
            raise ValueError("draws, probes and seeds must be non-empty")
        if self.h_mode not in ("unit", "general"):
            raise ValueError("h_mode must be 'unit' or 'general'")
        if len(self.patch_grids) < 2:
            raise ValueError("patch_grids needs at least two sizes for an order estimate")


@dataclass
class CheckRecord:
    check_id: str
    suite: str
    parameters: dict
    computed: object
    expected: object
    comparison: str
    tolerance: float | None
    abs_err: float
    rel_err: float
    passed: bool
    asserted: bool = True
    wall_time: float = 0.0

    def as_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return {k: _jsonable(d[k]) for k in RECORD_FIELDS}


def deterministic_view(record_dicts):
    """Ledger records with every timing-dependent value removed."""
    out = []
    for d in record_dicts:
        d = {k: v for k, v in d.items() if k != "wall_time"}
        if d["check_id"] in TIMING_CHECKS:
            for k in ("computed", "abs_err", "rel_err"):
                d.pop(k)
        out.append(d)
    return out


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def make_record(check_id, suite, computed, expected, comparison, tolerance, parameters=None, asserted=True, wall=0.0):
    c = float(np.real(computed)) if np.isscalar(computed) else computed
    e = float(expected) if np.isscalar(expected) else expected
    if comparison in ("abs", "rel"):
        abs_err = float(abs(np.asarray(c) - np.asarray(e)).max())
        rel_err = abs_err / max(float(abs(np.asarray(e)).max()), 1e-300) if np.any(np.asarray(e) != 0) else abs_err
        err = abs_err if comparison == "abs" else rel_err
        ok = bool(err <= tolerance)
    elif comparison == "ge":
        abs_err = max(0.0, e - c)
        rel_err = abs_err / max(abs(e), 1e-300)
        ok = bool(c >= e)
    elif comparison == "le":
        abs_err = max(0.0, c - e)
        rel_err = abs_err / max(abs(e), 1e-300)
        ok = bool(c <= e)
    else:
        raise ValueError(f"unknown comparison {comparison!r}")
    return CheckRecord(check_id, suite, parameters or {}, computed, expected, comparison, tolerance,
                       float(abs_err), float(rel_err), ok if asserted else True, asserted, float(wall))


def rng_for(seed, stream, draw=0):
    """Counter-based generator keyed by ``(seed, stream, draw)``."""
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, (zlib.crc32(stream.encode()) << 32) | int(draw)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class Recorder:
    def __init__(self, suite):
        self.suite = suite
        self.records = []
        self._t = time.perf_counter()

    def add(self, check_id, computed, expected, comparison, tolerance=None, asserted=True, **params):
        now = time.perf_counter()
        rec = make_record(f"{self.suite}.{check_id}", self.suite, computed, expected, comparison, tolerance,
                          params, asserted, now - self._t)
        self._t = now
        self.records.append(rec)
        return rec


def _draw_iter(cfg, stream):
    for seed in cfg.seeds:
        for k in range(cfg.draws):
            yield seed, rng_for(seed, stream, k)


# ---------------------------------------------------------------------------
# reduce

def suite_reduce(cfg):
    from .grid import GridSpec, random_field
    from .reduction4d import pauli_check, random_four_d_field, reduction_discrepancy

    R = Recorder("reduce")
    pc = pauli_check()
    R.add("pauli_relations", sum(not v for v in pc["checks"].values()), 0, "abs", 0.0,
          relations=sorted(pc["checks"]))
    g = GridSpec.torus(cfg.grid)
    t0 = time.perf_counter()
    worst = 0.0
    n = 0
    for _, rng in _draw_iter(cfg, "reduce"):
        worst = max(worst, reduction_discrepancy(random_four_d_field(g, rng)))
        n += 1
    elapsed = time.perf_counter() - t0
    R.add("equivalence", worst, 0.0, "abs", cfg.tol, grid=cfg.grid, samples=n)
    per_100 = elapsed * 100 / n
    R.add("runtime_per_100", per_100, 10.0, "le", grid=cfg.grid)

    rng = rng_for(cfg.seeds[0], "reduce.negative")
    f4 = random_four_d_field(g, rng)
    f4.extra_d3 = {"A1": random_field(g, rng, real=True), "psi1": random_field(g, rng)}
    R.add("negative_control", reduction_discrepancy(f4), 1e-6, "ge", grid=cfg.grid)
    return R.records


# ---------------------------------------------------------------------------
# patch

def suite_patch(cfg):
    from .equations import CALIBRATION_CONSTANT, hyperbolic_patch_config, residuals
    from .grid import GridSpec, sup_norm

    R = Recorder("patch")
    c = CALIBRATION_CONSTANT
    errs, hs = [], []
    finest = None
    for n in cfg.patch_grids:
        g = GridSpec.patch(n, r0=cfg.patch_r0)
        conf = hyperbolic_patch_config(c, c, 0.0, g)
        rep = residuals(conf)
        errs.append(rep.as_dict())
        hs.append(g.dx)
        finest = conf
    for key in ("curvature_sup", "dirac_sup"):
        e = [d[key] for d in errs]
        pairwise = [math.log(e[k] / e[k + 1]) / math.log(hs[k] / hs[k + 1]) for k in range(len(e) - 1)]
        # least-squares slope of log(residual) against log(dx) over all grids
        fitted = float(np.polyfit(np.log(hs), np.log(e), 1)[0])
        R.add(f"order.{key.split('_')[0]}", fitted, 1.9, "ge",
              grids=list(cfg.patch_grids), r0=cfg.patch_r0, residuals=e, pairwise_orders=pairwise)
    R.add("higgs_residual", max(d["higgs_sup"] for d in errs), 0.0, "abs", cfg.tol)
    last = errs[-1]
    R.add("finest_residual", max(last["curvature_sup"], last["higgs_sup"], last["dirac_sup"]), 1e-5, "le",
          grid=cfg.patch_grids[-1], r0=cfg.patch_r0)
    # |psi1|_H^2 = |e^f|^2 = 1/2 pointwise
    g = finest.grid
    R.add("calibration", sup_norm(np.abs(finest.psi.psi1) ** 2 * finest.H - 0.5, g), 0.0, "abs", cfg.tol)
    if cfg.snapshot:
        import os

        from .snapshot import config_components, snapshot_roundtrip

        os.makedirs(cfg.snapshot, exist_ok=True)
        path = os.path.join(cfg.snapshot, f"patch_{g.nx}.swrd")
        rt = snapshot_roundtrip(path, g, config_components(finest))
        R.add("snapshot_roundtrip", int(not rt["bit_exact"]), 0, "abs", 0.0, path=path)
    return R.records


# ---------------------------------------------------------------------------
# liouville and coupled solver

def suite_liouville(cfg):
    from .equations import CALIBRATION_CONSTANT, curvature_k, hyperbolic_h, hyperbolic_patch_config, residuals
    from .gauge import SpinorPair
    from .grid import GridSpec, MetricData, random_field, sup_norm
    from .solver import SolverOptions, newton_coupled, quadratic_contraction, solve_liouville

    R = Recorder("liouville")
    g = GridSpec.patch(cfg.liouville_grid, r0=cfg.liouville_r0)
    h = hyperbolic_h(g)
    a = g.half_width
    bump = 0.3 * np.cos(np.pi * g.x / (2 * a)) * np.cos(np.pi * g.y / (2 * a))
    sigma, trace = solve_liouville(h, 0.5, g, SolverOptions(), sigma0=bump)
    final = trace.residuals[-1]
    R.add("hyperbolic_residual", final, 1e-10, "le", grid=g.nx, r0=g.r0, iterations=len(trace.records) - 1)
    R.add("sigma_recovered", float(np.max(np.abs(sigma))), 1e-4, "le", grid=g.nx,
          note="discrete solution differs from 0 by the O(dx^2) truncation error")
    ratio, npairs, _ = quadratic_contraction(trace.residuals, 10.0, 1e-2, trace.floor)
    R.add("quadratic_contraction", ratio, 10.0, "le", pairs=npairs, floor=trace.floor, trace=trace.records)
    R.add("quadratic_pairs", npairs, 1, "ge")
    verify = sup_norm(curvature_k(MetricData(h, sigma), g) + 0.5, g)
    R.add("verifier_agreement", abs(verify - final), 0.0, "abs", cfg.tol)

    sigma0, _ = solve_liouville(h, 0.5, g)
    rng = rng_for(cfg.seeds[0], "liouville.guess")
    small = 1e-3 * random_field(g, rng, real=True)
    sigma_r, _ = solve_liouville(h, 0.5, g, sigma0=small)
    R.add("guess_independence", float(np.max(np.abs(sigma0 - sigma_r))), 0.0, "abs", 1e-8)

    g32 = GridSpec.patch(cfg.grid, r0=cfg.liouville_r0)
    s_triv, _ = solve_liouville(np.ones(g32.shape), 0.0, g32, sigma0=0.01 * np.ones(g32.shape))
    R.add("flat_target", float(np.max(np.abs(s_triv))), 0.0, "abs", cfg.tol)

    # coupled Gauss-Newton on the default patch
    gp = GridSpec.patch(cfg.grid)
    c = CALIBRATION_CONSTANT
    exact = hyperbolic_patch_config(c, c, 0.0, gp)
    q, tr = newton_coupled(exact)
    R.add("coupled_fixed_point", tr.records[-1]["residual_l2"], 1e-11, "le", iterations=len(tr.records) - 1)
    R.add("coupled_fixed_point_iterations", len(tr.records) - 1, 2, "le")
    R.add("coupled_verifier_agreement", abs(residuals(q).combined_l2 - tr.records[-1]["residual_l2"]), 0.0, "abs", cfg.tol)
    rng = rng_for(cfg.seeds[0], "liouville.coupled")
    pert = exact.with_(psi=SpinorPair(exact.psi.psi1 + 1e-3 * random_field(gp, rng),
                                      exact.psi.psi2bar + 1e-3 * random_field(gp, rng)))
    q2, tr2 = newton_coupled(pert)
    R.add("coupled_perturbed", tr2.records[-1]["residual_l2"], 1e-9, "le",
          trace=[r["residual_l2"] for r in tr2.records], flags=tr2.flags)
    from .equations import Configuration

    q3, tr3 = newton_coupled(Configuration.flat(gp))
    degenerate = any(f.startswith("degenerate") for f in tr3.flags)
    R.add("coupled_degenerate_flagged", int(not degenerate), 0, "abs", 0.0, flags=tr3.flags)
    if cfg.snapshot:
        import os

        os.makedirs(cfg.snapshot, exist_ok=True)
        with open(os.path.join(cfg.snapshot, "liouville_trace.jsonl"), "w") as fh:
            fh.write(trace.to_jsonl())
        with open(os.path.join(cfg.snapshot, "coupled_trace.jsonl"), "w") as fh:
            fh.write(tr2.to_jsonl())
    return R.records


# ---------------------------------------------------------------------------
# deformation complex and index

FORMULA_TABLE = [
    # (g, c1, full, phi0_bothspinors, phi0_psi1zero), evaluated by hand
    (0, 0, 2, 2, 1),
    (1, 0, 4, 2, 2),
    (2, -2, 2, -2, 1),
    (2, 0, 6, 2, 3),
    (2, 1, 8, 4, 4),
    (3, -1, 6, 0, 3),
    (3, 2, 12, 6, 6),
    (0, 3, 8, 8, 4),
    (4, -3, 4, -4, 2),
    (5, 5, 22, 12, 11),
]


def base_points(grid, rng):
    """Five constant-coefficient zeros of the Dirac-type equation; the last
    two have ``Phi = 0`` and ``|psi1| != |psi2|``."""
    from .equations import constant_solution

    cz = lambda: complex(*rng.uniform(0.3, 1.0, 2) * rng.choice([-1, 1], 2))
    pts = []
    for _ in range(3):
        pts.append(constant_solution(grid, cz(), cz(), h=rng.uniform(0.8, 1.5), sigma=rng.uniform(-0.2, 0.2),
                                     H=rng.uniform(0.5, 2.0)))
    for _ in range(2):
        psi1 = cz()
        pts.append(constant_solution(grid, 0, psi1, 2.0 * abs(psi1) * np.exp(1j * rng.uniform(0, 6.28)),
                                     H=rng.uniform(0.5, 2.0)))
    return pts


def suite_index(cfg):
    from .equations import Configuration, random_configuration
    from .grid import GridSpec
    from .linearization import (
        FieldBasis, apply_d1, apply_d2, assemble_complex, cohomology_dims, dimension_formula, displace,
        image_to_vector, random_tangent, raw_residuals, riemann_roch_index, tangent_to_vector,
    )

    R = Recorder("index")
    g = GridSpec.torus(cfg.matrix_grid)
    basis = FieldBasis.for_grid(g)
    pts = base_points(g, rng_for(cfg.seeds[0], "index.base"))

    worst_mat = worst_vec = 0.0
    worst_lit = 0.0
    h0s, gaps, chis, assembly_err = [], [], [], 0.0
    for k, p in enumerate(pts):
        asm = assemble_complex(p, basis=basis)
        worst_mat = max(worst_mat, asm.complex_defect())
        n1, n2 = np.linalg.norm(asm.D1, 2), np.linalg.norm(asm.D2, 2)
        for seed in cfg.seeds:
            for j in range(cfg.draws):
                z = rng_for(seed, f"index.zeta.{k}", j).standard_normal(basis.size)
                worst_vec = max(worst_vec, np.linalg.norm(asm.D2 @ (asm.D1 @ z)) / (n1 * n2 * np.linalg.norm(z)))
        z = rng_for(cfg.seeds[0], f"index.assembly.{k}").standard_normal(basis.size)
        direct = tangent_to_vector(basis, apply_d1(p, 1j * basis.expand(z)))
        assembly_err = max(assembly_err, np.linalg.norm(direct - asm.D1 @ z) / np.linalg.norm(direct))
        rep = cohomology_dims(asm)
        h0s.append(rep.h0)
        gaps.append(min(rep.gap_ratios.values()))
        rep0 = cohomology_dims(assemble_complex(p, t=0.0, basis=basis))
        chis.append((rep0.euler_characteristic, rep.euler_characteristic))
        if k >= 3:
            worst_lit = max(worst_lit, assemble_complex(p, reading="literal", basis=basis).complex_defect())
    R.add("d2d1_matrix", worst_mat, 0.0, "abs", cfg.tol, base_points=len(pts), grid=g.nx)
    R.add("d2d1_random_zeta", worst_vec, 0.0, "abs", cfg.tol, samples=len(pts) * cfg.draws * len(cfg.seeds))
    R.add("d1_assembly", assembly_err, 0.0, "abs", 1e-13)
    R.add("h0_vanishes", max(h0s), 0, "abs", 0.0, h0=h0s)
    R.add("gap_ratio", min(gaps), 1e3, "ge")
    R.add("literal_reading_breaks_complex", worst_lit, 1e-6, "ge",
          note="the complex pairing leaves d2 d1 != 0 when |psi1| != |psi2|")
    R.add("t_homotopy_euler", max(abs(a - b) for a, b in chis), 0, "abs", 0.0, pairs=chis)

    flat = Configuration.flat(g)
    for sub, expected in (("alpha", 2), ("gamma", 2)):
        rep = cohomology_dims(assemble_complex(flat, t=0.0, subcomplex=sub, basis=basis))
        R.add(f"h1_{sub}_subcomplex", rep.h1, expected, "abs", 0.0, gap=min(rep.gap_ratios.values()))

    # directional derivative of the residuals
    gr = GridSpec.torus(16)
    rng = rng_for(cfg.seeds[0], "index.fd")
    p = random_configuration(gr, rng)
    X = random_tangent(gr, rng)
    lin = image_to_vector(FieldBasis(gr, np.eye(gr.nx * gr.ny)), *apply_d2(p, X))

    def flat_res(q):
        mu, dphi, rows = raw_residuals(q)
        return image_to_vector(FieldBasis(gr, np.eye(gr.nx * gr.ny)), mu, dphi, rows)

    r0 = flat_res(p)
    errs = [np.linalg.norm(flat_res(displace(p, X, e)) - r0 - e * lin) for e in (1e-3, 5e-4)]
    slope = math.log(errs[0] / errs[1]) / math.log(2.0)
    R.add("directional_derivative_slope", slope, 2.0, "abs", 0.05, errors=errs)

    gi = GridSpec.torus(cfg.index_grid)
    for d in range(-3, 4):
        rep = riemann_roch_index(d, gi)
        R.add(f"riemann_roch.d{d:+d}", rep.index, d, "abs", 0.0, case="lattice_dbar", g=1, c1_or_d=d,
              formula=d, gap_ratio=rep.gap_ratio, n_plus=rep.n_plus, n_minus=rep.n_minus)
        R.add(f"riemann_roch_gap.d{d:+d}", rep.gap_ratio, 1e3, "ge")
    mism = 0
    for gg, c1, full, both, zero in FORMULA_TABLE:
        mism += (dimension_formula(gg, c1, "full") != full) + (dimension_formula(gg, c1, "phi0_bothspinors") != both)
        mism += dimension_formula(gg, c1, "phi0_psi1zero") != zero
    R.add("dimension_formula_table", mism, 0, "abs", 0.0, rows=len(FORMULA_TABLE))
    return R.records


# ---------------------------------------------------------------------------
# symplectic

def suite_symplectic(cfg):
    from .equations import CALIBRATION_CONSTANT, hyperbolic_patch_config, random_configuration
    from .gauge import GaugeTransform
    from .gauge import SpinorPair
    from .grid import GridSpec, random_field
    from .linearization import TangentVector, random_tangent
    from .solver import newton_coupled
    from .symplectic import (
        Psi0Reference, acs_apply, closedness_defect, gauge_orbit_orthogonality, gauge_transform_config,
        hamiltonian_check, hamiltonian_h_zeta, metric_g, nondegeneracy_probe, omega, omega_psi0, push_forward,
    )

    R = Recorder("symplectic")
    g = GridSpec.torus(cfg.grid)
    psi0 = Psi0Reference.single_zero(g)
    worst = dict.fromkeys(("g_symmetry", "compatibility", "acs_square", "acs_reality", "omega_antisymmetry",
                           "omega_acs_invariance", "gauge_invariance", "acs_commutes_gauge", "g_display",
                           "omega_psi0_reduces", "omega_psi0_antisymmetry"), 0.0)
    min_gxx = np.inf
    ham = 0.0
    for _, rng in _draw_iter(cfg, "symplectic"):
        p = random_configuration(g, rng)
        X, Y = random_tangent(g, rng), random_tangent(g, rng)
        gxx, gyy = metric_g(p, X, X), metric_g(p, Y, Y)
        scale = math.sqrt(gxx * gyy)
        min_gxx = min(min_gxx, gxx)
        worst["g_symmetry"] = max(worst["g_symmetry"], abs(metric_g(p, X, Y) - metric_g(p, Y, X)) / scale)
        worst["compatibility"] = max(worst["compatibility"], abs(metric_g(p, acs_apply(X), Y) - omega(p, X, Y)) / scale)
        IIX = acs_apply(acs_apply(X))
        d = max(np.max(np.abs(IIX.alpha.p10 + X.alpha.p10)), np.max(np.abs(IIX.alpha.p01 + X.alpha.p01)),
                np.max(np.abs(IIX.beta.psi1 + X.beta.psi1)), np.max(np.abs(IIX.beta.psi2bar + X.beta.psi2bar)),
                np.max(np.abs(IIX.gamma.p10 + X.gamma.p10)), np.max(np.abs(IIX.gamma.p01 + X.gamma.p01)))
        worst["acs_square"] = max(worst["acs_square"], d)
        worst["acs_reality"] = max(worst["acs_reality"], acs_apply(X).reality_defect())
        worst["omega_antisymmetry"] = max(worst["omega_antisymmetry"],
                                          abs(omega(p, X, Y) + omega(p, Y, X)) / scale, abs(omega(p, X, X)) / gxx)
        worst["omega_acs_invariance"] = max(worst["omega_acs_invariance"],
                                            abs(omega(p, acs_apply(X), acs_apply(Y)) - omega(p, X, Y)) / scale)
        gt = GaugeTransform.from_angle(random_field(g, rng, real=True))
        q = gauge_transform_config(p, gt)
        uX, uY = push_forward(gt, X), push_forward(gt, Y)
        worst["gauge_invariance"] = max(
            worst["gauge_invariance"],
            abs(metric_g(q, uX, uY) - metric_g(p, X, Y)) / scale,
            abs(omega(q, uX, uY) - omega(p, X, Y)) / scale,
            abs(omega_psi0(q, Psi0Reference(psi0.psi0 * np.exp(-gt.zeta), psi0.zero_set), uX, uY)
                - omega_psi0(p, psi0, X, Y)) / scale,
        )
        a, b = push_forward(gt, acs_apply(X)), acs_apply(push_forward(gt, X))
        worst["acs_commutes_gauge"] = max(worst["acs_commutes_gauge"],
                                          np.max(np.abs(a.beta.psi1 - b.beta.psi1)), np.max(np.abs(a.alpha.p10 - b.alpha.p10)))
        # g(X, X) for beta = 0 is 4 int |a|^2 + 4 int |c|^2
        Z = TangentVector(X.alpha, SpinorPair(0 * X.beta.psi1, 0 * X.beta.psi2bar), X.gamma)
        disp = 4 * g.cell_area * np.sum(np.abs(X.alpha.p10) ** 2 + np.abs(X.gamma.p10) ** 2)
        worst["g_display"] = max(worst["g_display"], abs(metric_g(p, Z, Z) - disp) / disp)
        p1 = p.with_(H=np.ones(g.shape))
        one = Psi0Reference(np.ones(g.shape, dtype=complex), [])
        worst["omega_psi0_reduces"] = max(worst["omega_psi0_reduces"], abs(omega_psi0(p1, one, X, Y) - omega(p1, X, Y)) / scale)
        worst["omega_psi0_antisymmetry"] = max(worst["omega_psi0_antisymmetry"],
                                               abs(omega_psi0(p, psi0, X, Y) + omega_psi0(p, psi0, Y, X)) / scale)
        zeta = 1j * random_field(g, rng, real=True)
        dh, rhs = hamiltonian_check(p, zeta, X)
        ham = max(ham, abs(dh - rhs) / max(abs(dh), 1e-30))
    n = len(cfg.seeds) * cfg.draws
    for key, val in worst.items():
        R.add(key, val, 0.0, "abs", cfg.tol, samples=n)
    R.add("g_positive", min_gxx, 0.0, "ge", samples=n)
    R.add("g_zero_vector", metric_g(p, X * 0.0, X * 0.0), 0.0, "abs", 0.0)
    R.add("hamiltonian", ham, 0.0, "abs", 1e-10, eps=0.1, samples=n)

    rng = rng_for(cfg.seeds[0], "symplectic.closed")
    p = random_configuration(g, rng)
    Xs = [random_tangent(g, rng) for _ in range(3)]
    scale = metric_g(p, Xs[0], Xs[0])
    R.add("closedness", max(abs(closedness_defect(p, *Xs)), abs(closedness_defect(p, *Xs, form=lambda q, a, b: omega_psi0(q, psi0, a, b)))) / scale,
          0.0, "abs", 1e-10)

    gp = GridSpec.patch(cfg.grid)
    c = CALIBRATION_CONSTANT
    sol, _ = newton_coupled(hyperbolic_patch_config(c, c, 0.0, gp))
    rng = rng_for(cfg.seeds[0], "symplectic.hsol")
    hz = max(abs(hamiltonian_h_zeta(sol, 1j * random_field(gp, rng, real=True))) for _ in range(5))
    R.add("h_zeta_at_solution", hz, 0.0, "abs", 1e-10, grid=gp.nx)

    gm = GridSpec.torus(cfg.matrix_grid)
    pts = base_points(gm, rng_for(cfg.seeds[0], "index.base"))
    orbit, pos, neg = 0.0, 0.0, np.inf
    for k, p in enumerate(pts):
        for seed in cfg.seeds:
            rep = gauge_orbit_orthogonality(p, rng_for(seed, f"symplectic.orbit.{k}"))
            orbit, pos, neg = max(orbit, rep.orbit_direction_residual), max(pos, rep.projected_residual), min(neg, rep.unprojected_residual)
    R.add("orbit_direction_projects_to_zero", orbit, 0.0, "abs", 1e-8)
    R.add("orbit_projected", pos, 0.0, "abs", 1e-8)
    R.add("orbit_negative_control", neg, 1e-3, "ge")

    psi0m = Psi0Reference.single_zero(gm)
    ratios = []
    for seed in cfg.seeds:
        for k in range(cfg.probes):
            sv, _ = nondegeneracy_probe(pts[k % len(pts)], psi0m, rng_for(seed, "symplectic.nondeg", k))
            ratios.append(float(sv[-1] / sv[0]))
    R.add("omega_psi0_nondegenerate", min(ratios), 1e-8, "ge", probes=len(ratios), zero_nodes=psi0m.zero_set)
    return R.records


# ---------------------------------------------------------------------------
# quillen

def suite_quillen(cfg):
    from .equations import random_configuration
    from .gauge import GaugeTransform
    from .grid import GridSpec, random_field
    from .linearization import TangentVector, random_tangent
    from .quillen import (
        acs_compatibility, bc_nodewise_identity, curvature_sum_M, curvature_sum_P, identity_ts,
        identity_pm, make_b_forms, rel_err,
    )
    from .symplectic import Psi0Reference, push_forward

    R = Recorder("quillen")
    g = GridSpec.torus(cfg.grid)
    psi0 = Psi0Reference.single_zero(g)
    general = cfg.h_mode == "general"
    keys = ("prequantum_PM", "prequantum_TS", "cross_terms", "acs_compatibility", "bc_nodewise",
            "unitarity", "antisymmetry", "gauge_invariance", "P_closed_form", "M_closed_form")
    worst = dict.fromkeys(keys, 0.0)
    reports = []
    for seed, rng in _draw_iter(cfg, "quillen"):
        p = random_configuration(g, rng, general_h=general)
        X, Y = random_tangent(g, rng), random_tangent(g, rng)
        r_pm = identity_pm(p, psi0, X, Y)
        r_ts = identity_ts(p, psi0, X, Y)
        if len(reports) < 3:
            reports.append({**r_pm.as_dict(), "seed": seed})
        worst["prequantum_PM"] = max(worst["prequantum_PM"], r_pm.rel_err)
        worst["prequantum_TS"] = max(worst["prequantum_TS"], r_ts.rel_err)
        worst["cross_terms"] = max(worst["cross_terms"], r_pm.extras["cross_P"], r_pm.extras["cross_M"])
        worst["acs_compatibility"] = max(worst["acs_compatibility"], acs_compatibility(p, psi0, X, Y))
        worst["bc_nodewise"] = max(worst["bc_nodewise"], bc_nodewise_identity(p, psi0, X, Y))
        B, bc = make_b_forms(p, psi0, X, Y)
        worst["unitarity"] = max(worst["unitarity"], B.unitarity_defect(), bc.unitarity_defect())
        PXX = curvature_sum_P(p, psi0, X, X).value + curvature_sum_M(p, X, X).value
        worst["antisymmetry"] = max(worst["antisymmetry"], abs(PXX) / max(abs(r_pm.lhs), 1e-30),
                                    rel_err(curvature_sum_P(p, psi0, Y, X).value, -curvature_sum_P(p, psi0, X, Y).value))
        gt = GaugeTransform.from_angle(random_field(g, rng, real=True))
        from .symplectic import gauge_transform_config

        q = gauge_transform_config(p, gt)
        s0 = Psi0Reference(psi0.psi0 * np.exp(-gt.zeta), psi0.zero_set)
        B2, bc2 = make_b_forms(q, s0, push_forward(gt, X), push_forward(gt, Y))
        worst["gauge_invariance"] = max(worst["gauge_invariance"],
                                        np.max(np.abs(B2.B_plus.p10 - B.B_plus.p10)) / np.max(np.abs(B.B_plus.p10)),
                                        np.max(np.abs(bc2.b_minus.p01 - bc.b_minus.p01)) / np.max(np.abs(bc.b_minus.p01)))
        P = curvature_sum_P(p, psi0, X, Y)
        M = curvature_sum_M(p, X, Y)
        worst["P_closed_form"] = max(worst["P_closed_form"], rel_err(P.value, P.closed_form))
        worst["M_closed_form"] = max(worst["M_closed_form"], rel_err(M.value, M.closed_form))
    n = len(cfg.seeds) * cfg.draws
    tol = {"prequantum_PM": 1e-10, "prequantum_TS": 1e-10}
    for key, val in worst.items():
        R.add(f"{key}.{cfg.h_mode}_h", val, 0.0, "abs", tol.get(key, cfg.tol), asserted=not general,
              samples=n, H_mode=cfg.h_mode, **({"examples": reports} if key == "prequantum_PM" else {}))

    # closed-form special cases
    p = random_configuration(g, rng_for(cfg.seeds[0], "quillen.special"), general_h=False)
    rng = rng_for(cfg.seeds[0], "quillen.special.t")
    X, Y = random_tangent(g, rng), random_tangent(g, rng)
    z = 0 * X.beta.psi1
    from .gauge import SpinorPair
    from .grid import integrate_two_form, wedge

    Xa = TangentVector(X.alpha, SpinorPair(z, z), X.gamma * 0.0)
    Ya = TangentVector(Y.alpha, SpinorPair(z, z), Y.gamma * 0.0)
    aa = complex(integrate_two_form(wedge(X.alpha, Y.alpha), g))
    r = identity_pm(p, psi0, Xa, Ya)
    R.add("alpha_only_both_sides", max(rel_err(r.lhs, -1j / np.pi * aa), rel_err(r.rhs, -1j / np.pi * aa)), 0.0, "abs", cfg.tol)
    _, bcz = make_b_forms(p, psi0, Xa, Ya)
    R.add("zero_beta_forms", max(np.max(np.abs(f.p10)) + np.max(np.abs(f.p01))
                                 for f in (bcz.b_plus, bcz.b_minus, bcz.c_plus, bcz.c_minus)), 0.0, "abs", 0.0)
    Xg = TangentVector(X.alpha * 0.0, SpinorPair(z, z), X.gamma)
    Yg = TangentVector(Y.alpha * 0.0, SpinorPair(z, z), Y.gamma)
    gg = complex(integrate_two_form(wedge(X.gamma, Y.gamma), g))
    r = identity_ts(p, psi0, Xg, Yg)
    R.add("gamma_only_S", rel_err(complex(*r.extras["F_S"]), -2j / np.pi * gg), 0.0, "abs", cfg.tol)
    zero = TangentVector(X.alpha * 0.0, SpinorPair(z, z), X.gamma * 0.0)
    r = identity_ts(p, psi0, zero, zero)
    R.add("zero_tangents", abs(r.lhs) + abs(r.rhs), 0.0, "abs", 0.0)
    return R.records


SUITE_FUNCS = {
    "reduce": suite_reduce,
    "patch": suite_patch,
    "liouville": suite_liouville,
    "index": suite_index,
    "symplectic": suite_symplectic,
    "quillen": suite_quillen,
}


def run_suites(cfg):
    """Run the selected suites in dependency order and return all records."""
    records = []
    for name in SUITES:
        if name in cfg.suites:
            records.extend(SUITE_FUNCS[name](cfg))
    return records
