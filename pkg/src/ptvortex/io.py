"""File formats: GPE2 binary field dumps, CSV tables, run manifests.

GPE2 layout: magic bytes b"GPE2", little-endian u32 n_x, u32 n_y, f64 x_min,
x_max, y_min, y_max, then n_x*n_y complex samples (f64 re, f64 im) in
row-major y-outer order (index iy*n_x + ix).  Real fields use im = 0.
Coefficient files are CSV lines `n_x,n_y,re,im`.
"""

import os
import struct
import tempfile

import numpy as np

from .basis import GridSpec, Wavefunction

GPE2_MAGIC = b"GPE2"
_HEADER = struct.Struct("<4sII4d")


def _fmt(x):
    return format(float(x), ".17g")


def write_gpe2(path, psi):
    """Dump a Wavefunction (or real field via Wavefunction wrapper) to GPE2."""
    grid = psi.grid
    header = _HEADER.pack(GPE2_MAGIC, grid.n_x, grid.n_y,
                          grid.x_min, grid.x_max, grid.y_min, grid.y_max)
    data = np.ascontiguousarray(psi.values, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())


def read_gpe2(path):
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) < _HEADER.size:
            raise ValueError(f"{path}: truncated GPE2 header")
        magic, n_x, n_y, x_min, x_max, y_min, y_max = _HEADER.unpack(raw)
        if magic != GPE2_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    expected = n_x * n_y * 16
    if len(payload) != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, got {len(payload)}")
    values = np.frombuffer(payload, dtype=np.complex128).reshape(n_y, n_x).copy()
    grid = GridSpec(x_min, x_max, y_min, y_max, n_x, n_y)
    return Wavefunction(values, grid)


def write_coeffs_csv(path, coeffs, basis):
    lines = ["n_x,n_y,re,im"]
    for (nx, ny), c in zip(basis.states, coeffs):
        lines.append(f"{nx},{ny},{_fmt(c.real)},{_fmt(c.imag)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_coeffs_csv(path):
    """Returns (states list, complex coefficient array) in file order."""
    states, coeffs = [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "n_x,n_y,re,im":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            if not line.strip():
                continue
            nx, ny, re, im = line.strip().split(",")
            states.append((int(nx), int(ny)))
            coeffs.append(complex(float(re), float(im)))
    return states, np.array(coeffs, dtype=np.complex128)


BRANCH_CSV_HEADER = "param,mu_re,mu_im,Ekin,Epot_re,Epot_im,Jphi,norm_residual"


def write_branch_csv(path, rows):
    """rows: iterable of (param, mu, e_kin, e_pot, jphi, residual_norm)."""
    lines = [BRANCH_CSV_HEADER]
    for param, mu, e_kin, e_pot, jphi, res in rows:
        lines.append(",".join([
            _fmt(param), _fmt(mu.real), _fmt(mu.imag), _fmt(e_kin),
            _fmt(e_pot.real), _fmt(e_pot.imag), _fmt(jphi), _fmt(res)]))
    _atomic_write_text(path, "\n".join(lines) + "\n")


SWEEP_CSV_HEADER = "param,max_imag,n_unstable_modes"


def write_sweep_csv(path, rows):
    lines = [SWEEP_CSV_HEADER]
    for param, max_imag, n_unstable in rows:
        lines.append(f"{_fmt(param)},{_fmt(max_imag)},{int(n_unstable)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def write_omegas_csv(path, omegas):
    lines = ["omega_re,omega_im"]
    for w in omegas:
        lines.append(f"{_fmt(w.real)},{_fmt(w.imag)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


TRAJECTORY_CSV_HEADER = "t,x,y,norm,overlap"


def write_trajectory_csv(path, traj):
    lines = [TRAJECTORY_CSV_HEADER]
    for t, (x, y), norm, ov in zip(traj.times, traj.centers, traj.norms, traj.overlaps):
        lines.append(f"{_fmt(t)},{_fmt(x)},{_fmt(y)},{_fmt(norm)},{_fmt(ov)}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_trajectory_csv(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data


def _atomic_write_text(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(path, entries):
    """Atomically write a key-value manifest; `outputs` may be a list of paths."""
    lines = []
    for key, value in entries.items():
        if key == "outputs":
            for i, item in enumerate(value):
                lines.append(f"output.{i} = {item}")
        else:
            lines.append(f"{key} = {value}")
    _atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path):
    out = {"outputs": []}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or "=" not in line:
                continue
            key, value = (p.strip() for p in line.split("=", 1))
            if key.startswith("output."):
                out["outputs"].append(value)
            else:
                out[key] = value
    return out
