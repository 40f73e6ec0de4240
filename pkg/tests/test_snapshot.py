import numpy as np
import pytest

from swlab.equations import random_configuration
from swlab.grid import GridSpec
from swlab.snapshot import (
    SnapshotError, config_components, decode, encode, read_config, read_snapshot, snapshot_roundtrip,
    write_config, write_snapshot,
)


def test_random_configuration_round_trips_bit_exact(tmp_path, rng):
    g = GridSpec.torus(16)
    c = random_configuration(g, rng)
    rep = snapshot_roundtrip(tmp_path / "c.swrd", g, config_components(c))
    assert rep["bit_exact"] and rep["components"] == 7


def test_configuration_reader_rebuilds_fields(tmp_path, rng):
    g = GridSpec.patch(16, r0=0.3, margin=3)
    c = random_configuration(g, rng)
    write_config(tmp_path / "p.swrd", c)
    back = read_config(tmp_path / "p.swrd")
    assert back.grid == g
    assert np.array_equal(back.psi.psi1, c.psi.psi1)
    assert np.array_equal(back.A.potential.p01, c.A.potential.p01)
    assert np.array_equal(back.H, c.H)


def test_empty_component_list_is_valid(tmp_path):
    g = GridSpec.torus(8)
    write_snapshot(tmp_path / "e.swrd", g, [])
    grid, comps = read_snapshot(tmp_path / "e.swrd")
    assert grid == g and comps == []


def test_corrupted_inputs_are_rejected():
    g = GridSpec.torus(8)
    data = encode(g, [np.ones(g.shape)])
    with pytest.raises(SnapshotError, match="magic"):
        decode(b"XXXX" + data[4:])
    with pytest.raises(SnapshotError, match="version"):
        decode(data[:4] + (99).to_bytes(4, "little") + data[8:])
    with pytest.raises(SnapshotError, match="truncated"):
        decode(data[:-1])
    with pytest.raises(SnapshotError, match="truncated"):
        decode(data[:10])
    with pytest.raises(SnapshotError, match="domain"):
        decode(data[:8] + bytes([7]) + data[9:])


def test_wrong_shape_is_refused():
    with pytest.raises(ValueError):
        encode(GridSpec.torus(8), [np.zeros((16, 16))])
