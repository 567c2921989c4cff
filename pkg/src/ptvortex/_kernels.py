"""Hot numeric kernels with numba-accelerated and pure-numpy implementations.

The numba path is used when numba imports cleanly; set the environment
variable ``PTVORTEX_DISABLE_NUMBA=1`` (before import) to force the numpy
fallback.  Both paths compute identical results; ``benchmarks/bench_kernels.py``
compares them.
"""

import os

import numpy as np

__all__ = [
    "BACKEND",
    "hermite_table",
    "apply_potential_phase",
    "hermite_table_numpy",
    "apply_potential_phase_numpy",
]

_SQRT2 = np.sqrt(2.0)
_PI_QUARTER = np.pi ** -0.25


def hermite_table_numpy(n_max, x):
    """Normalized Hermite functions h_0..h_{n_max} sampled at points x.

    h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2), evaluated with the
    stable three-term recurrence on the normalized functions.  Returns an
    array of shape (n_max+1, len(x)).
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1, x.size), dtype=np.float64)
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = _SQRT2 * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def apply_potential_phase_numpy(psi, v_real, v_imag, g, dt):
    """Exact flow of the potential substep i psi_t = (V + g|psi|^2) psi.

    With V = v_real + i*v_imag the density obeys rho_t = 2 v_imag rho (the
    cubic term is real), so rho(t) = rho0 e^{2 v_imag t} in closed form and
    the accumulated nonlinear phase is g rho0 (e^{2 v_imag dt} - 1)/(2 v_imag)
    [-> g rho0 dt as v_imag -> 0].  Amplitude gain where v_imag > 0.
    """
    dens = psi.real * psi.real + psi.imag * psi.imag
    z = 2.0 * dt * v_imag
    # phi1(z) = (e^z - 1)/z, stable at z = 0
    phi1 = np.ones_like(z)
    nz = z != 0.0
    phi1[nz] = np.expm1(z[nz]) / z[nz]
    return psi * np.exp(dt * v_imag - 1j * dt * (v_real + g * dens * phi1))


def _numba_enabled():
    flag = os.environ.get("PTVORTEX_DISABLE_NUMBA", "")
    return flag.strip() in ("", "0")


BACKEND = "numpy"

if _numba_enabled():
    try:
        from numba import njit

        @njit(cache=True)
        def _hermite_table_nb(n_max, x):
            m = x.shape[0]
            out = np.empty((n_max + 1, m))
            for i in range(m):
                out[0, i] = _PI_QUARTER * np.exp(-0.5 * x[i] * x[i])
            if n_max >= 1:
                for i in range(m):
                    out[1, i] = _SQRT2 * x[i] * out[0, i]
            for n in range(1, n_max):
                a = np.sqrt(2.0 / (n + 1))
                b = np.sqrt(n / (n + 1.0))
                for i in range(m):
                    out[n + 1, i] = a * x[i] * out[n, i] - b * out[n - 1, i]
            return out

        @njit(cache=True)
        def _apply_potential_phase_nb(psi, v_real, v_imag, g, dt):
            out = np.empty_like(psi)
            flat_psi = psi.ravel()
            flat_vr = v_real.ravel()
            flat_vi = v_imag.ravel()
            flat_out = out.ravel()
            for i in range(flat_psi.shape[0]):
                p = flat_psi[i]
                dens = p.real * p.real + p.imag * p.imag
                z = 2.0 * dt * flat_vi[i]
                phi1 = np.expm1(z) / z if z != 0.0 else 1.0
                flat_out[i] = p * np.exp(
                    complex(dt * flat_vi[i], -dt * (flat_vr[i] + g * dens * phi1))
                )
            return out

        def hermite_table(n_max, x):
            return _hermite_table_nb(int(n_max), np.ascontiguousarray(x, dtype=np.float64))

        hermite_table.__doc__ = hermite_table_numpy.__doc__

        def apply_potential_phase(psi, v_real, v_imag, g, dt):
            return _apply_potential_phase_nb(
                np.ascontiguousarray(psi), np.ascontiguousarray(v_real),
                np.ascontiguousarray(v_imag), float(g), float(dt))

        apply_potential_phase.__doc__ = apply_potential_phase_numpy.__doc__

        BACKEND = "numba"
    except ImportError:
        hermite_table = hermite_table_numpy
        apply_potential_phase = apply_potential_phase_numpy
else:
    hermite_table = hermite_table_numpy
    apply_potential_phase = apply_potential_phase_numpy
