"""Binary field snapshots.

Layout (little-endian)::

    magic     4 bytes  b"SWRD"
    version   u32
    domain    u8       0 periodic_torus, 1 disk_patch
    nx, ny    u32, u32
    r0        f64      patch radius (ignored on the torus)
    margin    u32
    count     u32      number of components
    data      count * nx * ny complex values, each as (re, im) f64,
              component-major, row-major within a component

A :class:`~swlab.equations.Configuration` is stored with the components
``A10, psi1, psi2bar, phi, h, sigma, H`` in that order.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

from .constants import DOMAIN_CODES, SNAPSHOT_MAGIC, SNAPSHOT_VERSION

_HEADER = struct.Struct("<4sIBIIdII")
CONFIG_COMPONENTS = ("A10", "psi1", "psi2bar", "phi", "h", "sigma", "H")


class SnapshotError(ValueError):
    pass


def encode(grid, components):
    code = DOMAIN_CODES[grid.kind]
    head = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, code, grid.nx, grid.ny, float(grid.r0), grid.margin, len(components))
    body = b"".join(np.ascontiguousarray(grid.check(np.asarray(c)), dtype="<c16").tobytes() for c in components)
    return head + body


def decode(data):
    from .grid import GridSpec

    if len(data) < _HEADER.size:
        raise SnapshotError("truncated snapshot header")
    magic, version, code, nx, ny, r0, margin, count = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotError(f"bad magic bytes {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    kinds = {v: k for k, v in DOMAIN_CODES.items()}
    if code not in kinds:
        raise SnapshotError(f"unknown domain code {code}")
    grid = GridSpec(kinds[code], nx, ny, r0=r0, margin=margin) if code else GridSpec(kinds[code], nx, ny)
    size = nx * ny * 16
    expected = _HEADER.size + count * size
    if len(data) != expected:
        raise SnapshotError(f"snapshot has {len(data)} bytes, expected {expected} (truncated or padded)")
    comps = []
    for k in range(count):
        off = _HEADER.size + k * size
        comps.append(np.frombuffer(data, dtype="<c16", count=nx * ny, offset=off).reshape(nx, ny).astype(complex))
    return grid, comps


def _atomic_write(path, data):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".snap-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_snapshot(path, grid, components):
    _atomic_write(path, encode(grid, components))


def read_snapshot(path):
    with open(path, "rb") as fh:
        return decode(fh.read())


def config_components(c):
    return [c.A.potential.p10, c.psi.psi1, c.psi.psi2bar, c.phi.phi, c.metric.h, c.metric.sigma, c.H]


def write_config(path, c):
    write_snapshot(path, c.grid, config_components(c))


def read_config(path):
    from .equations import Configuration
    from .gauge import Connection, HiggsField, SpinorPair
    from .grid import MetricData, OneForm

    grid, comps = read_snapshot(path)
    if len(comps) != len(CONFIG_COMPONENTS):
        raise SnapshotError(f"a configuration has {len(CONFIG_COMPONENTS)} components, found {len(comps)}")
    a10, psi1, psi2bar, phi, h, sigma, H = comps
    A = Connection(potential=OneForm.imaginary(a10, "unitary_connection"))
    return Configuration(grid, A, SpinorPair(psi1, psi2bar), HiggsField(phi), MetricData(h.real, sigma.real), H.real)


def snapshot_roundtrip(path, grid, components):
    """Write then read; report whether every byte of field data survived."""
    write_snapshot(path, grid, components)
    grid2, back = read_snapshot(path)
    same = grid2 == grid and len(back) == len(components) and all(
        np.asarray(a, dtype="<c16").tobytes() == b.astype("<c16").tobytes() for a, b in zip(components, back)
    )
    return {"path": str(path), "components": len(components), "bit_exact": bool(same)}
