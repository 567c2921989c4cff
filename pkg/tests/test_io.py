import numpy as np
import pytest

import ptvortex as pv
from ptvortex.io import (read_coeffs_csv, read_gpe2, read_manifest, read_trajectory_csv,
                         write_coeffs_csv, write_gpe2, write_manifest,
                         write_trajectory_csv, GPE2_MAGIC)


def _random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((grid.n_y, grid.n_x)) \
        + 1j * rng.standard_normal((grid.n_y, grid.n_x))
    return pv.Wavefunction(vals, grid)


def test_gpe2_round_trip(tmp_path, run_grid):
    psi = _random_field(run_grid)
    path = tmp_path / "field.gpe2"
    write_gpe2(path, psi)
    back = read_gpe2(path)
    np.testing.assert_array_equal(back.values, psi.values)
    assert back.grid.same_points(run_grid)


def test_gpe2_layout_is_documented_binary(tmp_path, run_grid):
    psi = _random_field(run_grid, seed=3)
    path = tmp_path / "field.gpe2"
    write_gpe2(path, psi)
    raw = path.read_bytes()
    assert raw[:4] == GPE2_MAGIC
    n_x = int.from_bytes(raw[4:8], "little")
    n_y = int.from_bytes(raw[8:12], "little")
    assert (n_x, n_y) == (run_grid.n_x, run_grid.n_y)
    assert len(raw) == 12 + 4 * 8 + n_x * n_y * 16
    # row-major y-outer: first sample is (ix=0, iy=0), second is (ix=1, iy=0)
    first = np.frombuffer(raw[44:60], dtype=np.complex128)[0]
    second = np.frombuffer(raw[60:76], dtype=np.complex128)[0]
    assert first == psi.values[0, 0]
    assert second == psi.values[0, 1]


def test_gpe2_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.gpe2"
    path.write_bytes(b"NOPE" + b"\x00" * 60)
    with pytest.raises(ValueError, match="magic"):
        read_gpe2(path)


def test_gpe2_rejects_truncated_payload(tmp_path, run_grid):
    psi = _random_field(run_grid)
    path = tmp_path / "trunc.gpe2"
    write_gpe2(path, psi)
    data = path.read_bytes()
    path.write_bytes(data[:-8])
    with pytest.raises(ValueError, match="payload"):
        read_gpe2(path)


def test_coeffs_csv_round_trip(tmp_path, basis11):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(basis11.n_states) + 1j * rng.standard_normal(basis11.n_states)
    path = tmp_path / "state.coeff.csv"
    write_coeffs_csv(path, c, basis11)
    states, back = read_coeffs_csv(path)
    assert states == list(basis11.states)
    np.testing.assert_array_equal(back, c)


def test_coeffs_csv_header(tmp_path, basis11):
    path = tmp_path / "state.coeff.csv"
    write_coeffs_csv(path, np.zeros(basis11.n_states, dtype=complex), basis11)
    assert path.read_text().splitlines()[0] == "n_x,n_y,re,im"


def test_trajectory_csv_round_trip(tmp_path):
    traj = pv.Trajectory(times=np.array([0.0, 0.1, 0.2]),
                         centers=np.array([[0.1, 0.2], [0.11, 0.19], [0.12, 0.18]]),
                         norms=np.array([1.0, 1.0, 1.0]),
                         overlaps=np.array([1.0, 0.99, 0.98]))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj)
    data = read_trajectory_csv(path)
    assert list(data.dtype.names) == ["t", "x", "y", "norm", "overlap"]
    np.testing.assert_allclose(data["x"], traj.centers[:, 0])


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "manifest.txt"
    write_manifest(path, {"command": "solve", "seed": 7,
                          "outputs": ["a.csv", "b.gpe2"]})
    back = read_manifest(path)
    assert back["command"] == "solve"
    assert back["seed"] == "7"
    assert back["outputs"] == ["a.csv", "b.gpe2"]


def test_write_is_atomic(tmp_path, basis11):
    # a failed write must not leave a partial file behind
    target = tmp_path / "x.csv"
    write_coeffs_csv(target, np.zeros(basis11.n_states, dtype=complex), basis11)
    before = target.read_bytes()

    class Boom(Exception):
        pass

    bad = np.zeros(basis11.n_states, dtype=object)
    bad[:] = None
    with pytest.raises(Exception):
        write_coeffs_csv(target, bad, basis11)
    assert target.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]
