"""Density, phase, probability current, circulation and continuity diagnostics.

Derivatives are spectral (FFT) on the propagation grid; the fields decay
below 1e-8 at the boundary so the periodification error is negligible.
"""

from dataclasses import dataclass

import numpy as np

from .basis import GridSpec, Wavefunction
from .errors import AmplitudeTooSmallError
from .potential import imaginary_on_grid

_IMAG_LEAK_TOL = 1e-12


@dataclass
class CurrentField:
    """Probability current components j = i(psi grad psi* - psi* grad psi)."""

    jx: np.ndarray
    jy: np.ndarray
    grid: GridSpec


def _derivative_multipliers(grid):
    # zero the unpaired Nyquist bin: keeps the derivative skew-adjoint on the
    # grid and avoids spurious content from periodification kinks
    kx, ky = grid.wavenumbers()
    kx = kx.copy()
    ky = ky.copy()
    kx[:, grid.n_x // 2] = 0.0
    ky[grid.n_y // 2, :] = 0.0
    return kx, ky


def _gradient(values, grid):
    kx, ky = _derivative_multipliers(grid)
    ft = np.fft.fft2(values)
    dpsi_dx = np.fft.ifft2(1j * kx * ft)
    dpsi_dy = np.fft.ifft2(1j * ky * ft)
    return dpsi_dx, dpsi_dy


def density_field(psi):
    """|psi|^2 on the grid."""
    return np.abs(psi.values) ** 2


def phase_field(psi):
    """arg(psi) in (-pi, pi]."""
    return np.angle(psi.values)


def current_density(psi):
    """j = i(psi grad psi* - psi* grad psi), evaluated spectrally."""
    dpsi_dx, dpsi_dy = _gradient(psi.values, psi.grid)
    vals = psi.values
    conj = np.conj(vals)
    jx = 1j * (vals * np.conj(dpsi_dx) - conj * dpsi_dx)
    jy = 1j * (vals * np.conj(dpsi_dy) - conj * dpsi_dy)
    leak = max(np.abs(jx.imag).max(), np.abs(jy.imag).max())
    if leak > _IMAG_LEAK_TOL:
        raise FloatingPointError(f"current density has imaginary leakage {leak:.2e}")
    return CurrentField(jx=jx.real, jy=jy.real, grid=psi.grid)


def divergence(current):
    """div j, spectral.

    Residual imaginary output tracks the field's grid-scale content; it is
    discarded here but bounds the trustworthiness of the result, so a large
    leak raises.
    """
    kx, ky = _derivative_multipliers(current.grid)
    djx = np.fft.ifft2(1j * kx * np.fft.fft2(current.jx))
    djy = np.fft.ifft2(1j * ky * np.fft.fft2(current.jy))
    out = djx + djy
    leak = np.abs(out.imag).max()
    if leak > 1e-6 + 1e-3 * np.abs(out.real).max():
        raise FloatingPointError(
            "spectral divergence unreliable: grid-scale (Nyquist) content "
            f"{leak:.2e} vs field scale {np.abs(out.real).max():.2e}")
    return out.real


def azimuthal_current(psi):
    """Quadrature of j . e_phi = (x j_y - y j_x)/r; the r=0 cell is skipped."""
    cur = current_density(psi)
    X, Y = psi.grid.meshgrid()
    r = np.hypot(X, Y)
    mask = r > 0.5 * min(psi.grid.dx, psi.grid.dy)
    integrand = np.zeros_like(r)
    integrand[mask] = (X[mask] * cur.jy[mask] - Y[mask] * cur.jx[mask]) / r[mask]
    return float(integrand.sum() * psi.grid.cell_area)


def _bilinear(values, grid, xs, ys):
    fx = (xs - grid.x_min) / grid.dx
    fy = (ys - grid.y_min) / grid.dy
    ix = np.floor(fx).astype(int)
    iy = np.floor(fy).astype(int)
    if (ix < 0).any() or (iy < 0).any() or (ix + 1 >= grid.n_x).any() or (iy + 1 >= grid.n_y).any():
        raise ValueError("sample points outside the grid")
    tx = fx - ix
    ty = fy - iy
    v00 = values[iy, ix]
    v01 = values[iy, ix + 1]
    v10 = values[iy + 1, ix]
    v11 = values[iy + 1, ix + 1]
    return ((1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v01
            + (1 - tx) * ty * v10 + tx * ty * v11)


def winding_number(psi, center=(0.0, 0.0), radius=1.0, n_samples=720):
    """Quantized circulation index: accumulated phase around a loop / 2 pi."""
    angles = 2.0 * np.pi * np.arange(n_samples + 1) / n_samples
    xs = center[0] + radius * np.cos(angles)
    ys = center[1] + radius * np.sin(angles)
    samples = _bilinear(psi.values, psi.grid, xs, ys)
    amp = np.abs(samples)
    if amp.min() < 1e-6:
        raise AmplitudeTooSmallError(
            f"loop crosses a near-node region (min |psi| = {amp.min():.2e})")
    dphi = np.angle(samples[1:] / samples[:-1])  # wrapped to (-pi, pi]
    total = dphi.sum()
    return int(np.rint(total / (2.0 * np.pi)))


def continuity_residual(psi, spec):
    """div j - 2 rho Gamma V_I on the grid; vanishes for stationary states."""
    cur = current_density(psi)
    rho = density_field(psi)
    vi = imaginary_on_grid(spec, psi.grid)
    return divergence(cur) - 2.0 * rho * spec.gamma * vi
