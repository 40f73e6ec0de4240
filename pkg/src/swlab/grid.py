"""Discretized 2-D domains, complex-coordinate calculus and differential forms.

Two domains are supported:

* ``periodic_torus`` -- the square ``[0, 2pi)^2`` with spectral derivatives.
* ``disk_patch`` -- a square of half-width ``r0 / sqrt(2)`` centred at the
  origin of the unit disk (so every node has ``|z| <= r0``), with
  second-order finite differences.  The outer ``margin`` layers are boundary
  nodes: they carry data but are excluded from norms and integrals.  Two
  layers are the default so that composed first derivatives (curvature of a
  numerically differentiated potential) stay second order up to the interior
  edge.

Fields are plain numpy arrays whose last two axes are ``(x, y)`` (``'ij'``
indexing).  Leading axes are treated as a batch, which the matrix assembly in
:mod:`swlab.linearization` relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TORUS = "periodic_torus"
PATCH = "disk_patch"


class DomainMismatch(ValueError):
    """A field does not live on the grid an operator was asked to use."""


@dataclass(frozen=True)
class GridSpec:
    kind: str
    nx: int
    ny: int
    r0: float = 0.1
    margin: int = 2

    def __post_init__(self):
        if self.kind not in (TORUS, PATCH):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        for n in (self.nx, self.ny):
            if n < 8 or n % 2:
                raise ValueError("nx and ny must be even and >= 8")
        if self.kind == PATCH:
            if not 0.0 < self.r0 < 1.0:
                raise ValueError("patch radius must satisfy 0 < r0 < 1")
            if self.margin < 1:
                raise ValueError("patch needs at least one boundary layer")

    @classmethod
    def torus(cls, n, ny=None):
        return cls(TORUS, n, n if ny is None else ny)

    @classmethod
    def patch(cls, n, r0=0.1, margin=2):
        return cls(PATCH, n, n, r0=r0, margin=margin)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def is_torus(self):
        return self.kind == TORUS

    @cached_property
    def half_width(self):
        return self.r0 / np.sqrt(2.0) if self.kind == PATCH else np.pi

    @cached_property
    def dx(self):
        if self.is_torus:
            return 2 * np.pi / self.nx
        return 2 * self.half_width / (self.nx - 1)

    @cached_property
    def dy(self):
        if self.is_torus:
            return 2 * np.pi / self.ny
        return 2 * self.half_width / (self.ny - 1)

    @cached_property
    def coords(self):
        if self.is_torus:
            x = np.arange(self.nx) * self.dx
            y = np.arange(self.ny) * self.dy
        else:
            a = self.half_width
            x = np.linspace(-a, a, self.nx)
            y = np.linspace(-a, a, self.ny)
        return np.meshgrid(x, y, indexing="ij")

    @property
    def x(self):
        return self.coords[0]

    @property
    def y(self):
        return self.coords[1]

    @cached_property
    def z(self):
        return self.x + 1j * self.y

    @cached_property
    def interior(self):
        """Boolean mask of nodes that enter norms and integrals."""
        mask = np.ones(self.shape, dtype=bool)
        if not self.is_torus:
            m = self.margin
            mask[:m, :] = mask[-m:, :] = False
            mask[:, :m] = mask[:, -m:] = False
        return mask

    @property
    def cell_area(self):
        return self.dx * self.dy

    def check(self, f):
        if np.shape(f)[-2:] != self.shape:
            raise DomainMismatch(f"field shape {np.shape(f)} does not match grid {self.shape}")
        return f


# ---------------------------------------------------------------------------
# forms

@dataclass
class OneForm:
    """``p10 dz + p01 dzbar``."""

    p10: np.ndarray
    p01: np.ndarray
    reality_tag: str = "general"

    @classmethod
    def imaginary(cls, a, tag="imaginary_valued"):
        """The iR-valued form ``a dz - conj(a) dzbar``."""
        a = np.asarray(a, dtype=complex)
        return cls(a, -np.conj(a), tag)

    @classmethod
    def zeros(cls, grid, tag="general"):
        z = np.zeros(grid.shape, dtype=complex)
        return cls(z, z.copy(), tag)

    def __add__(self, other):
        tag = self.reality_tag if self.reality_tag == other.reality_tag else "general"
        return OneForm(self.p10 + other.p10, self.p01 + other.p01, tag)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, c):
        tag = self.reality_tag if np.isrealobj(c) else "general"
        return OneForm(self.p10 * c, self.p01 * c, tag)

    __rmul__ = __mul__

    def reality_defect(self):
        """Max of ``|p01 + conj(p10)|``; zero for iR-valued forms."""
        return float(np.max(np.abs(self.p01 + np.conj(self.p10)), initial=0.0))


@dataclass
class TwoForm:
    """``coeff dz^dzbar``."""

    coeff: np.ndarray

    def __add__(self, other):
        return TwoForm(self.coeff + other.coeff)

    def __sub__(self, other):
        return TwoForm(self.coeff - other.coeff)

    def __mul__(self, c):
        return TwoForm(self.coeff * c)

    __rmul__ = __mul__


@dataclass
class MetricData:
    """Conformal data ``ds^2 = h^2 dz dzbar`` rescaled by ``e^{2 sigma}``."""

    h: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if np.any(self.h <= 0):
            raise ValueError("h must be positive")

    @classmethod
    def flat(cls, grid):
        return cls(np.ones(grid.shape), np.zeros(grid.shape))

    @property
    def rho(self):
        """The conformal factor ``e^sigma h``."""
        return np.exp(self.sigma) * self.h

    @property
    def omega(self):
        return TwoForm(1j * self.rho**2 + 0j)

    @property
    def theta(self):
        # e^sigma h dz, so that i theta ^ conj(theta) == omega
        return OneForm(self.rho + 0j, np.zeros_like(self.rho, dtype=complex))

    @property
    def theta_bar(self):
        return OneForm(np.zeros_like(self.rho, dtype=complex), self.rho + 0j)


# ---------------------------------------------------------------------------
# calculus

def _wavenumbers(grid):
    kx = np.fft.fftfreq(grid.nx, d=grid.dx) * 2 * np.pi
    ky = np.fft.fftfreq(grid.ny, d=grid.dy) * 2 * np.pi
    # The Nyquist mode has no odd derivative that keeps real fields real.
    kx[grid.nx // 2] = 0.0
    ky[grid.ny // 2] = 0.0
    return kx[:, None], ky[None, :]


def partial(f, grid, axis):
    """Real-coordinate derivative along ``axis`` ('x' or 'y')."""
    f = grid.check(np.asarray(f))
    if grid.is_torus:
        kx, ky = _wavenumbers(grid)
        k = kx if axis == "x" else ky
        return np.fft.ifft2(1j * k * np.fft.fft2(f, axes=(-2, -1)), axes=(-2, -1))
    ax = -2 if axis == "x" else -1
    step = grid.dx if axis == "x" else grid.dy
    return np.gradient(f, step, axis=ax, edge_order=2)


def derivative(f, grid, which):
    """``d f/dz`` (which='z') or ``d f/dzbar`` (which='zbar').

    >>> g = GridSpec.torus(16)
    >>> f = np.exp(1j * (g.x + g.y))
    >>> bool(np.allclose(derivative(f, g, "z"), 0.5 * (1j + 1) * f))
    True
    """
    fx = partial(f, grid, "x")
    fy = partial(f, grid, "y")
    if which == "z":
        return 0.5 * (fx - 1j * fy)
    if which == "zbar":
        return 0.5 * (fx + 1j * fy)
    raise ValueError(f"which must be 'z' or 'zbar', not {which!r}")


def laplacian(f, grid):
    """``4 d_z d_zbar f``.

    On the patch interior this is the compact five-point stencil; margin
    nodes fall back to composed one-sided differences.
    """
    f = grid.check(np.asarray(f))
    if grid.is_torus:
        return partial(partial(f, grid, "x"), grid, "x") + partial(partial(f, grid, "y"), grid, "y")
    out = partial(partial(f, grid, "x"), grid, "x") + partial(partial(f, grid, "y"), grid, "y")
    c = f[..., 1:-1, 1:-1]
    out[..., 1:-1, 1:-1] = (
        (f[..., 2:, 1:-1] - 2 * c + f[..., :-2, 1:-1]) / grid.dx**2
        + (f[..., 1:-1, 2:] - 2 * c + f[..., 1:-1, :-2]) / grid.dy**2
    )
    return out


def exterior_d(a, grid):
    """``d(p10 dz + p01 dzbar) = (d_z p01 - d_zbar p10) dz^dzbar``."""
    return TwoForm(derivative(a.p01, grid, "z") - derivative(a.p10, grid, "zbar"))


def d0(f, grid, tag="general"):
    """Exterior derivative of a function as a OneForm."""
    return OneForm(derivative(f, grid, "z"), derivative(f, grid, "zbar"), tag)


def wedge(a, b):
    return TwoForm(a.p10 * b.p01 - a.p01 * b.p10)


def hodge_star(a):
    """``*(a10) = -i a10``, ``*(a01) = i a01``."""
    return OneForm(-1j * a.p10, 1j * a.p01, a.reality_tag)


def star1(a):
    """The conjugating star: ``a10 dz -> -conj(a10) dzbar``, ``a01 dzbar -> conj(a01) dz``."""
    return OneForm(np.conj(a.p01), -np.conj(a.p10), a.reality_tag)


def integrate_function(f, grid):
    """Uniform Riemann sum of ``f dx dy`` over the (interior of the) domain."""
    f = grid.check(np.asarray(f))
    return np.sum(np.where(grid.interior, f, 0.0), axis=(-2, -1)) * grid.cell_area


def integrate_two_form(w, grid):
    """``int coeff dz^dzbar`` using ``dz^dzbar = -2i dx^dy``."""
    return -2j * integrate_function(w.coeff, grid)


def sup_norm(f, grid):
    f = grid.check(np.asarray(f))
    vals = np.abs(f[..., grid.interior])
    return float(np.max(vals)) if vals.size else 0.0


def l2_norm(f, grid):
    return float(np.sqrt(np.real(integrate_function(np.abs(f) ** 2, grid))))


# ---------------------------------------------------------------------------
# random fields and band-limited subspaces

def random_field(grid, rng, cutoff=None, real=False, amplitude=1.0):
    """Smooth random field.

    On the torus it is band-limited to ``|k| <= cutoff`` (default ``nx // 4``);
    on the patch it is a random trigonometric polynomial of low degree.
    """
    if grid.is_torus:
        cutoff = grid.nx // 4 if cutoff is None else cutoff
        coef = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        kx = np.fft.fftfreq(grid.nx, d=1.0 / grid.nx)[:, None]
        ky = np.fft.fftfreq(grid.ny, d=1.0 / grid.ny)[None, :]
        coef[(np.abs(kx) > cutoff) | (np.abs(ky) > cutoff)] = 0.0
        f = np.fft.ifft2(coef)
    else:
        cutoff = 3 if cutoff is None else cutoff
        a = grid.half_width
        f = np.zeros(grid.shape, dtype=complex)
        for m in range(cutoff + 1):
            for n in range(cutoff + 1):
                c = rng.standard_normal(2) @ [1, 1j]
                ph = rng.uniform(0, 2 * np.pi, 2)
                f += c * np.cos(m * np.pi * grid.x / (2 * a) + ph[0]) * np.cos(n * np.pi * grid.y / (2 * a) + ph[1])
    if real:
        f = f.real
    scale = np.sqrt(np.mean(np.abs(f) ** 2))
    return amplitude * f / scale if scale > 0 else f


def bandlimited_basis(grid):
    """Orthonormal basis (columns, shape ``(nx*ny, M)``) of real torus fields
    with no Nyquist content in either direction."""
    if not grid.is_torus:
        raise DomainMismatch("band-limited basis is defined on the torus only")
    nx, ny = grid.shape
    keep = np.ones((nx, ny), dtype=bool)
    keep[nx // 2, :] = False
    keep[:, ny // 2] = False
    eye = np.eye(nx * ny).reshape(nx * ny, nx, ny)
    proj = np.fft.ifft2(np.fft.fft2(eye, axes=(-2, -1)) * keep, axes=(-2, -1)).real
    proj = proj.reshape(nx * ny, nx * ny)
    w, v = np.linalg.eigh(0.5 * (proj + proj.T))
    return v[:, w > 0.5]


# long names used by callers that prefer explicit form degrees
hodge_star_one_form = hodge_star
star1_one_form = star1
wedge_one_forms = wedge
