"""Linear stability from the Bogoliubov-de Gennes eigenproblem.

Linearizing the time-dependent equation around a stationary state psi_0
gives the block eigenproblem [[A, B], [-B*, -A*]] (u, v) = omega (u, v) with
A = -del^2 + V_T + i Gamma V_I + 2g|psi_0|^2 - mu and B = g psi_0^2.  With
real basis functions the conjugated blocks are the entrywise conjugates of
the projected A and B.  Eigenfrequencies come in quartets
(omega, -omega, omega*, -omega*); any positive imaginary part marks an
exponentially growing fluctuation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .stationary import _GpeSystem, BROKEN_IM_MU_TOL

STABILITY_TOL = 1e-6


@dataclass
class BdgSpectrum:
    omegas: np.ndarray
    max_imag: float
    stable: bool
    state_ref: str = ""

    @property
    def n_unstable(self):
        return int(np.sum(self.omegas.imag > STABILITY_TOL))

    def quartet_defect(self):
        return quartet_defect(self.omegas)


def quartet_defect(omegas):
    """Max distance from any eigenvalue's quartet partners to the spectrum."""
    worst = 0.0
    for partner in (-omegas, np.conj(omegas), -np.conj(omegas)):
        dist = np.abs(partner[:, None] - omegas[None, :]).min(axis=1).max()
        worst = max(worst, float(dist))
    return worst


def build_bdg_matrix(state, basis, residual_tol=1e-6):
    """Assemble the 2N x 2N block matrix for a converged, PT-unbroken state."""
    if state.residual_norm > residual_tol:
        raise ValueError(
            f"state not converged (residual {state.residual_norm:.2e} > {residual_tol:g})")
    if abs(state.mu.imag) > BROKEN_IM_MU_TOL:
        raise ValueError(f"state has complex mu (Im mu = {state.mu.imag:.2e})")
    system = _GpeSystem(state.g, state.potential, basis)
    psi = system.field(state.coeffs)
    dens = np.abs(psi) ** 2
    a_blk = np.diag(system.energies - state.mu.real) \
        + system.project_operator(system.w_extra + 2.0 * state.g * dens)
    b_blk = system.project_operator(state.g * psi * psi)
    n = basis.n_states
    mat = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    mat[:n, :n] = a_blk
    mat[:n, n:] = b_blk
    mat[n:, :n] = -np.conj(b_blk)
    mat[n:, n:] = -np.conj(a_blk)
    return mat


def solve_bdg(matrix, state_ref="", stability_tol=STABILITY_TOL):
    """Full non-Hermitian eigensolve; stability from the largest Im omega > 0."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
        raise ValueError("expected a square matrix of even dimension")
    omegas = scipy.linalg.eigvals(matrix)
    max_imag = float(max(omegas.imag.max(), 0.0))
    return BdgSpectrum(omegas=omegas, max_imag=max_imag,
                       stable=max_imag < stability_tol, state_ref=state_ref)


def bdg_spectrum(state, basis, stability_tol=STABILITY_TOL, state_ref=""):
    return solve_bdg(build_bdg_matrix(state, basis), state_ref=state_ref,
                     stability_tol=stability_tol)


def stability_sweep(branch, basis, stability_tol=STABILITY_TOL):
    """One BdG solve per branch sample: [(param, max_imag, n_unstable)].

    Per-point failures (non-converged or PT-broken samples) are skipped,
    leaving gaps rather than aborting the sweep.
    """
    rows = []
    for value, state in branch.samples:
        try:
            spec = bdg_spectrum(state, basis, stability_tol=stability_tol,
                                state_ref=f"{branch.label.value}@{value:g}")
        except (ValueError, np.linalg.LinAlgError):
            continue
        rows.append((value, spec.max_imag, spec.n_unstable))
    return rows
