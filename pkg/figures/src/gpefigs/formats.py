"""Readers for the solver's documented file formats.

This package deliberately re-implements the readers from the format
documentation (it never imports the solver): GPE2 binary field dumps and the
CSV tables.  ``write_gpe2`` exists so round-tripping a reference file can be
verified byte-for-byte.
"""

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

GPE2_MAGIC = b"GPE2"
_HEADER = struct.Struct("<4sII4d")


@dataclass
class Field:
    """Complex samples on a uniform grid; values[iy, ix], y-outer layout."""

    values: np.ndarray
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @property
    def extent(self):
        """(left, right, bottom, top) for imshow."""
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    def x(self):
        n = self.values.shape[1]
        return self.x_min + (self.x_max - self.x_min) / n * np.arange(n)

    def y(self):
        n = self.values.shape[0]
        return self.y_min + (self.y_max - self.y_min) / n * np.arange(n)


def read_gpe2(path):
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise ValueError(f"{path}: truncated GPE2 header")
        magic, n_x, n_y, x_min, x_max, y_min, y_max = _HEADER.unpack(header)
        if magic != GPE2_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    if len(payload) != n_x * n_y * 16:
        raise ValueError(f"{path}: expected {n_x * n_y * 16} payload bytes, "
                         f"got {len(payload)}")
    values = np.frombuffer(payload, dtype="<c16").reshape(n_y, n_x).copy()
    return Field(values=values, x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)


def write_gpe2(path, field):
    n_y, n_x = field.values.shape
    header = _HEADER.pack(GPE2_MAGIC, n_x, n_y, field.x_min, field.x_max,
                          field.y_min, field.y_max)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes())


def sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _read_csv(path, expected_columns):
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or list(data.dtype.names) != expected_columns:
        raise ValueError(f"{path}: expected columns {expected_columns}, "
                         f"got {data.dtype.names}")
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    return np.atleast_1d(data)


def read_branch_csv(path):
    return _read_csv(path, ["param", "mu_re", "mu_im", "Ekin", "Epot_re",
                            "Epot_im", "Jphi", "norm_residual"])


def read_stability_csv(path):
    return _read_csv(path, ["param", "max_imag", "n_unstable_modes"])


def read_trajectory_csv(path):
    return _read_csv(path, ["t", "x", "y", "norm", "overlap"])
