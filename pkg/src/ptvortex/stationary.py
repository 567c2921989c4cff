"""Stationary Gross-Pitaevskii states as a nonlinear root search in the basis.

The unknowns are the complex basis coefficients plus a complex chemical
potential mu; the equations are the basis projections of
(-del^2 + V_T + i Gamma V_I + g|psi|^2 - mu) psi, the normalization
constraint, and a phase gauge pinning Im c_j = 0 for the largest
coefficient.  The kinetic-plus-trap part is diagonal (eigenvalues
2(n_x+n_y+1)); the remaining terms are applied on the quadrature grid and
projected back.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from .basis import BasisSet, coeffs_to_grid, grid_to_coeffs
from .errors import ConvergenceError, JacobianSingularError
from .potential import PotentialKind, PotentialSpec, complex_on_grid, imaginary_on_grid

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100
BROKEN_IM_MU_TOL = 1e-8
OVERLAP_MIN = 0.9


class BranchLabel(str, enum.Enum):
    GROUND = "GROUND"
    EXCITED_X = "EXCITED_X"
    EXCITED_Y = "EXCITED_Y"
    VORTEX_PLUS = "VORTEX_PLUS"
    VORTEX_MINUS = "VORTEX_MINUS"


@dataclass
class StationaryState:
    coeffs: np.ndarray
    mu: complex
    g: float
    potential: PotentialSpec
    residual_norm: float
    branch_label: BranchLabel = None

    @property
    def is_pt_unbroken(self):
        return abs(self.mu.imag) < BROKEN_IM_MU_TOL


@dataclass
class SpectrumBranch:
    label: BranchLabel
    parameter_name: str  # "gamma" or "d"
    samples: list  # [(parameter value, StationaryState)], sorted by parameter
    terminated_at: float = None
    termination_reason: str = None

    def parameter_values(self):
        return np.array([v for v, _ in self.samples])

    def mus(self):
        return np.array([s.mu for _, s in self.samples])


class _GpeSystem:
    """Precomputed grid data for one (g, potential, basis) combination."""

    def __init__(self, g, spec, basis):
        self.g = g
        self.spec = spec
        self.basis = basis
        self.energies = basis.linear_eigenvalues
        self.vi = imaginary_on_grid(spec, basis.grid) if spec.kind is not PotentialKind.CUSTOM \
            else spec.custom_values.imag
        if spec.kind is PotentialKind.CUSTOM:
            # tabulated potentials replace trap + gain/loss entirely
            self.w_extra = complex_on_grid(spec, basis.grid) - _trap_on(basis.grid)
        else:
            self.w_extra = 1j * spec.gamma * self.vi
        self.hx = basis.hx[: basis.n_max + 1]
        self.hy = basis.hy[: basis.n_max + 1]
        self.area = basis.grid.cell_area

    def field(self, c):
        return coeffs_to_grid(c, self.basis).values

    def project(self, values):
        return grid_to_coeffs(values, self.basis)

    def residual(self, c, mu):
        """(complex residual block, norm residual, field on grid)."""
        psi = self.field(c)
        w = self.w_extra + self.g * np.abs(psi) ** 2
        r = (self.energies - mu) * c + self.project(w * psi)
        norm_res = float(np.sum(np.abs(psi) ** 2).real * self.area - 1.0)
        return r, norm_res, psi

    def project_operator(self, q):
        """Basis matrix of pointwise multiplication by q: M_ab = <h_a| q |h_b>."""
        t1 = np.einsum("ki,li,ji->klj", self.hx, self.hx, q, optimize=True)
        m4 = np.einsum("klj,mj,nj->kmln", t1, self.hy, self.hy, optimize=True)
        m4 *= self.area
        ix = np.array([nx for nx, _ in self.basis.states])
        iy = np.array([ny for _, ny in self.basis.states])
        return m4[ix[:, None], iy[:, None], ix[None, :], iy[None, :]]

    def jacobian(self, c, mu, psi, gauge_index):
        """Real Jacobian of (Re r, Im r, norm, gauge) wrt (Re c, Im c, Re mu, Im mu)."""
        n = self.basis.n_states
        dens = np.abs(psi) ** 2
        m1 = self.project_operator(self.w_extra + 2.0 * self.g * dens)
        m2 = self.project_operator(self.g * psi * psi)
        a_c = np.diag(self.energies - mu) + m1
        ar, ai = a_c.real, a_c.imag
        p = self.project(np.conj(psi))
        jac = np.zeros((2 * n + 2, 2 * n + 2))
        jac[:n, :n] = ar + m2.real
        jac[:n, n:2 * n] = -ai + m2.imag
        jac[:n, 2 * n] = -c.real
        jac[:n, 2 * n + 1] = c.imag
        jac[n:2 * n, :n] = ai + m2.imag
        jac[n:2 * n, n:2 * n] = ar - m2.real
        jac[n:2 * n, 2 * n] = -c.imag
        jac[n:2 * n, 2 * n + 1] = -c.real
        jac[2 * n, :n] = 2.0 * p.real
        jac[2 * n, n:2 * n] = -2.0 * p.imag
        jac[2 * n + 1, n + gauge_index] = 1.0
        return jac


def _trap_on(grid):
    X, Y = grid.meshgrid()
    return (X**2 + Y**2).astype(np.complex128)


def gpe_residual(c, mu, g, spec, basis):
    """Residual vector of length n_states + 1 (last entry: norm constraint)."""
    c = np.asarray(c, dtype=np.complex128)
    if not np.isfinite(c).all():
        raise ValueError("coefficients must be finite")
    system = _GpeSystem(g, spec, basis)
    r, norm_res, _ = system.residual(c, mu)
    return np.concatenate([r, [norm_res + 0.0j]])


def initial_guess(label, basis):
    """Seed (coefficients, mu) for the five low-lying branches."""
    label = BranchLabel(label)
    if label is not BranchLabel.GROUND and basis.n_max < 1:
        raise ValueError("excited/vortex guesses require n_max >= 1")
    c = np.zeros(basis.n_states, dtype=np.complex128)
    if label is BranchLabel.GROUND:
        c[basis.index(0, 0)] = 1.0
        return c, 2.0
    if label is BranchLabel.EXCITED_X:
        c[basis.index(1, 0)] = 1.0
        return c, 4.0
    if label is BranchLabel.EXCITED_Y:
        c[basis.index(0, 1)] = 1.0
        return c, 4.0
    s = 1.0 / np.sqrt(2.0)
    if label is BranchLabel.VORTEX_PLUS:
        c[basis.index(1, 0)] = s
        c[basis.index(0, 1)] = 1j * s
        return c, 4.0
    c[basis.index(1, 0)] = s
    c[basis.index(0, 1)] = -1j * s
    return c, 4.0


def _fix_phase(c):
    j = int(np.argmax(np.abs(c)))
    phase = c[j] / abs(c[j])
    return c / phase


def solve_stationary(guess, g, spec, basis, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                     label=None):
    """Damped Newton iteration from (coefficients, mu) to a converged state.

    Raises ConvergenceError after max_iter or JacobianSingularError when the
    linearization is singular (typical right at a bifurcation point).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    c0, mu0 = guess
    c = np.asarray(c0, dtype=np.complex128).copy()
    nrm = np.linalg.norm(c)
    if not 0.9 <= nrm <= 1.1:
        raise ValueError(f"guess must be normalized within 10% (|c| = {nrm:.3f})")
    mu = complex(mu0)
    system = _GpeSystem(g, spec, basis)
    n = basis.n_states
    # start gauge-consistent: rotate the global phase so the pinned coefficient
    # (largest modulus) is real-positive before the first iteration
    c = _fix_phase(c)
    gauge = int(np.argmax(np.abs(c)))

    r, norm_res, psi = system.residual(c, mu)
    res_vec = np.concatenate([r.real, r.imag, [norm_res, c[gauge].imag]])
    res = np.linalg.norm(res_vec)
    for iteration in range(max_iter):
        if res < tol:
            c = _fix_phase(c)
            return StationaryState(coeffs=c, mu=mu, g=g, potential=spec,
                                   residual_norm=res, branch_label=label)
        if abs(c[gauge]) < 0.1 * np.abs(c).max():
            gauge = int(np.argmax(np.abs(c)))
            res_vec[2 * n + 1] = c[gauge].imag
            res = np.linalg.norm(res_vec)
        jac = system.jacobian(c, mu, psi, gauge)
        try:
            du = np.linalg.solve(jac, -res_vec)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingularError(f"singular Jacobian at iteration {iteration}") from exc
        if not np.isfinite(du).all():
            raise JacobianSingularError(f"non-finite Newton step at iteration {iteration}")

        step = 1.0
        for _ in range(10):
            c_new = c + step * (du[:n] + 1j * du[n:2 * n])
            mu_new = mu + step * complex(du[2 * n], du[2 * n + 1])
            r, norm_res, psi_new = system.residual(c_new, mu_new)
            new_vec = np.concatenate([r.real, r.imag, [norm_res, c_new[gauge].imag]])
            new_res = np.linalg.norm(new_vec)
            if new_res < res or new_res < tol:
                break
            step *= 0.5
        c, mu, psi = c_new, mu_new, psi_new
        res_vec, res = new_vec, new_res
        if not np.isfinite(res) or res > 1e8:
            raise ConvergenceError(
                f"diverged at iteration {iteration} (residual {res:.3e})",
                residual=res, iterations=iteration)

    if res < tol:
        c = _fix_phase(c)
        return StationaryState(coeffs=c, mu=mu, g=g, potential=spec,
                               residual_norm=res, branch_label=label)
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations (residual {res:.3e})",
        residual=res, iterations=max_iter)


def state_overlap(c1, c2):
    """|<psi1|psi2>| / (|psi1| |psi2|) in coefficient space."""
    num = abs(np.vdot(c1, c2))
    return num / (np.linalg.norm(c1) * np.linalg.norm(c2))


def _spec_with(spec, parameter, value):
    if parameter == "gamma":
        return spec.replace_gamma(value)
    if parameter == "d":
        return spec.replace_d(value)
    raise ValueError(f"unknown continuation parameter {parameter!r}")


def _pt_kind(spec):
    return spec.kind in (PotentialKind.A, PotentialKind.B, PotentialKind.C)


VORTEX_JPHI_FLOOR = 1e-8


def continue_branch(label, g, spec_template, parameter, values, basis,
                    tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, min_step=1e-4,
                    overlap_min=OVERLAP_MIN, stop_on_broken=True,
                    jphi_floor=VORTEX_JPHI_FLOOR):
    """Walk a solution branch over a sorted parameter grid, seeding each point
    with the previous converged state.

    Interior failures truncate the branch (terminated_at records the first
    unreachable value after adaptive step halving down to min_step); PT-broken
    states (|Im mu| above tolerance in a PT-symmetric potential) and identity
    loss (overlap below overlap_min) terminate it as well.  A vortex branch
    additionally ends when the measured azimuthal current falls below
    jphi_floor: at the pitchfork the Newton iteration slides smoothly onto the
    coalescing excited state, so branch identity is policed by the observable,
    not by convergence.  Extra samples at off-grid parameter values may be
    appended during step refinement so the recorded bracket around a
    termination is tight.
    """
    values = list(values)
    if len(values) == 0:
        raise ValueError("empty parameter list")
    diffs = np.diff(values)
    if len(diffs) and not ((diffs > 0).all() or (diffs < 0).all()):
        raise ValueError("parameter values must be sorted")
    label = BranchLabel(label)

    guess = initial_guess(label, basis)
    spec0 = _spec_with(spec_template, parameter, values[0])
    first = solve_stationary(guess, g, spec0, basis, tol=tol,
                             max_iter=max(max_iter, 200), label=label)
    samples = [(values[0], first)]
    branch = SpectrumBranch(label=label, parameter_name=parameter, samples=samples)

    is_vortex = label in (BranchLabel.VORTEX_PLUS, BranchLabel.VORTEX_MINUS)

    def acceptable(prev_state, state):
        if state_overlap(prev_state.coeffs, state.coeffs) < overlap_min:
            return "identity break"
        if stop_on_broken and _pt_kind(state.potential) and not state.is_pt_unbroken:
            return "pt broken"
        if is_vortex and jphi_floor is not None:
            from .observables import azimuthal_current
            if abs(azimuthal_current(coeffs_to_grid(state.coeffs, basis))) < jphi_floor:
                return "vortex merged"
        return None

    for target in values[1:]:
        cur_v, cur_state = samples[-1]
        reached = None
        attempt = target
        while True:
            spec = _spec_with(spec_template, parameter, attempt)
            try:
                st = solve_stationary((cur_state.coeffs, cur_state.mu), g, spec, basis,
                                      tol=tol, max_iter=max_iter, label=label)
                reason = acceptable(cur_state, st)
            except (ConvergenceError, JacobianSingularError):
                st, reason = None, "no convergence"
            if st is not None and reason is None:
                if attempt == target:
                    reached = st
                    break
                samples.append((attempt, st))
                cur_v, cur_state = attempt, st
                attempt = target
                continue
            if abs(attempt - cur_v) <= min_step:
                branch.terminated_at = attempt
                branch.termination_reason = reason
                return branch
            attempt = 0.5 * (cur_v + attempt)
        samples.append((target, reached))
    return branch


def locate_bifurcation(branch, g, basis, refine_tol=1e-3, tol=DEFAULT_TOL,
                       max_iter=DEFAULT_MAX_ITER, jphi_floor=None, record=False):
    """Bisect the parameter between the last converged sample and the first
    failed value, re-solving at midpoints; returns the critical value within
    refine_tol (or (value, last converged state) when record=True).

    For vortex branches pass jphi_floor (e.g. 1e-9): midpoint solutions whose
    azimuthal current falls below it are counted as beyond the bifurcation,
    which keeps the bisection from sliding onto the coalesced partner branch.
    """
    from .observables import azimuthal_current  # local import, avoids cycle
    from .basis import coeffs_to_grid as _to_grid

    if branch.terminated_at is None:
        raise ValueError("branch did not terminate inside the swept range")
    lo_v, lo_state = branch.samples[-1]
    hi_v = branch.terminated_at
    spec_template = lo_state.potential

    while abs(hi_v - lo_v) > refine_tol:
        mid = 0.5 * (lo_v + hi_v)
        spec = _spec_with(spec_template, branch.parameter_name, mid)
        ok = True
        try:
            st = solve_stationary((lo_state.coeffs, lo_state.mu), g, spec, basis,
                                  tol=tol, max_iter=max_iter, label=branch.label)
        except (ConvergenceError, JacobianSingularError):
            ok = False
        if ok:
            if state_overlap(lo_state.coeffs, st.coeffs) < OVERLAP_MIN:
                ok = False
            elif _pt_kind(spec) and not st.is_pt_unbroken:
                ok = False
            elif jphi_floor is not None:
                jphi = azimuthal_current(_to_grid(st.coeffs, basis))
                if abs(jphi) < jphi_floor:
                    ok = False
        if ok:
            lo_v, lo_state = mid, st
        else:
            hi_v = mid
    value = 0.5 * (lo_v + hi_v)
    return (value, lo_state) if record else value


def energy_split(state, basis):
    """(E_kin, E_pot) with E_kin = int |grad psi|^2 and E_pot = int V |psi|^2.

    The gradient comes from the Hermite derivative recurrence, the potential
    integral uses the full complex V, so E_pot is complex for Gamma != 0.
    """
    from .basis import _rect_from_states

    rect = _rect_from_states(basis, state.coeffs)
    hx, hy = basis.hx[: basis.n_max + 1], basis.hy[: basis.n_max + 1]
    dhx, dhy = basis.derivative_tables()
    psi = (hy.T @ rect.T) @ hx
    dpsi_dx = (hy.T @ rect.T) @ dhx
    dpsi_dy = (dhy.T @ rect.T) @ hx
    area = basis.grid.cell_area
    e_kin = float(np.sum(np.abs(dpsi_dx) ** 2 + np.abs(dpsi_dy) ** 2) * area)
    v = complex_on_grid(state.potential, basis.grid)
    e_pot = complex(np.sum(v * np.abs(psi) ** 2) * area)
    return e_kin, e_pot


def classify_state(state, basis, jphi_threshold=0.05):
    """Assign a branch label from measured observables, not from the seed.

    Nonzero azimuthal current means vortex (sign gives the circulation
    direction); otherwise the y-parity of the coefficients separates the
    excited y-state from the even states, and the dominant x-excitation
    separates the excited x-state from the ground state.
    """
    from .observables import azimuthal_current

    jphi = azimuthal_current(coeffs_to_grid(state.coeffs, basis))
    if abs(jphi) > jphi_threshold:
        return BranchLabel.VORTEX_PLUS if jphi > 0 else BranchLabel.VORTEX_MINUS
    c2 = np.abs(state.coeffs) ** 2
    odd_y = sum(w for w, (nx, ny) in zip(c2, basis.states) if ny % 2 == 1)
    if odd_y > 0.5:
        return BranchLabel.EXCITED_Y
    odd_x = sum(w for w, (nx, ny) in zip(c2, basis.states) if nx % 2 == 1)
    return BranchLabel.EXCITED_X if odd_x > 0.5 else BranchLabel.GROUND
