"""Truncated 2D harmonic-oscillator product basis and grid transforms.

Basis functions are eigenfunctions of -del^2 + x^2 + y^2 with eigenvalues
2(n_x + n_y + 1); the truncation keeps all products with n_x + n_y <= n_max.
Inner products are evaluated by quadrature on a uniform grid.  On the
endpoint-free uniform grids used here the trapezoidal rule reduces to the
plain Riemann sum; the basis constructor verifies that the resulting Gram
matrix is the identity to 1e-10, which requires the quadrature domain to
extend a few lengths past the classical turning point of h_{n_max}.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import hermite_table

MAX_HERMITE_ORDER = 64
ORTHONORMALITY_TOL = 1e-10


def _is_pow2(n):
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Uniform FFT-compatible grid, endpoint-excluded: x_i = x_min + i*dx."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    n_x: int
    n_y: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("grid domain is empty")
        if not (_is_pow2(self.n_x) and _is_pow2(self.n_y)):
            raise ValueError("grid points per axis must be powers of two")
        if abs(self.x_min + self.x_max) > 1e-12 or abs(self.y_min + self.y_max) > 1e-12:
            raise ValueError("grid domain must be symmetric about the origin")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_x

    @property
    def dy(self):
        return (self.y_max - self.y_min) / self.n_y

    @property
    def cell_area(self):
        return self.dx * self.dy

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_x)

    @property
    def y(self):
        return self.y_min + self.dy * np.arange(self.n_y)

    def meshgrid(self):
        """(X, Y) arrays of shape (n_y, n_x); fields are indexed [iy, ix]."""
        return np.meshgrid(self.x, self.y)

    def wavenumbers(self):
        """(KX, KY) FFT wavenumbers matching meshgrid layout."""
        kx = 2.0 * np.pi * np.fft.fftfreq(self.n_x, d=self.dx)
        ky = 2.0 * np.pi * np.fft.fftfreq(self.n_y, d=self.dy)
        return np.meshgrid(kx, ky)

    def same_points(self, other):
        return (
            self.n_x == other.n_x and self.n_y == other.n_y
            and abs(self.x_min - other.x_min) < 1e-12
            and abs(self.x_max - other.x_max) < 1e-12
            and abs(self.y_min - other.y_min) < 1e-12
            and abs(self.y_max - other.y_max) < 1e-12
        )


@dataclass
class Wavefunction:
    """Complex field sampled on a grid, values[iy, ix] = psi(x_ix, y_iy)."""

    values: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_y, self.grid.n_x):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"({self.grid.n_y}, {self.grid.n_x})")

    def norm_sq(self):
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_area)

    def normalized(self):
        return Wavefunction(self.values / np.sqrt(self.norm_sq()), self.grid)

    def copy(self):
        return Wavefunction(self.values.copy(), self.grid)


def default_grid():
    """Default propagation field of view: [-5,5]^2 with 128 points per axis."""
    return GridSpec(-5.0, 5.0, -5.0, 5.0, 128, 128)


def extended_grid():
    """Doubled field of view [-10,10]^2 with 256 points per axis."""
    return GridSpec(-10.0, 10.0, -10.0, 10.0, 256, 256)


def default_basis_grid(n_max):
    """Quadrature grid sized so the basis is orthonormal to 1e-10.

    The half-width clears the classical turning point sqrt(2 n_max + 1) by
    four oscillator lengths and the spacing stays well under the Nyquist
    limit of h_{n_max}.
    """
    half = max(6.0, np.sqrt(2.0 * n_max + 1.0) + 4.0)
    half = np.ceil(half * 4.0) / 4.0
    n = 128
    while 2.0 * half / n > 0.16:
        n *= 2
    return GridSpec(-half, half, -half, half, n, n)


def hermite_function(n, x):
    """Normalized Hermite function h_n at x (scalar or array)."""
    if n < 0:
        raise ValueError("order must be non-negative")
    if n > MAX_HERMITE_ORDER:
        raise ValueError(f"order {n} exceeds supported maximum {MAX_HERMITE_ORDER}")
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    vals = hermite_table(n, arr.ravel())[n].reshape(arr.shape)
    return vals if np.ndim(x) else float(vals.reshape(-1)[0])


def enumerate_states(n_max):
    """All (n_x, n_y) with n_x + n_y <= n_max, ordered by total n then n_x."""
    return tuple(
        (nx, n - nx) for n in range(n_max + 1) for nx in range(n + 1)
    )


@dataclass(frozen=True)
class BasisSet:
    """Truncated product basis with quadrature grid and sampled 1D factors."""

    n_max: int
    states: tuple
    grid: GridSpec
    hx: np.ndarray = field(repr=False)  # (n_max+2, n_x), order n_max+1 kept for derivatives
    hy: np.ndarray = field(repr=False)

    @property
    def n_states(self):
        return len(self.states)

    @property
    def linear_eigenvalues(self):
        """Eigenvalues 2(n_x+n_y+1) of -del^2 + x^2 + y^2 per basis state."""
        return np.array([2.0 * (nx + ny + 1) for nx, ny in self.states])

    def index(self, nx, ny):
        return self.states.index((nx, ny))

    def state_on_grid(self, k):
        """Sampled basis function h_{n_x}(x) h_{n_y}(y), shape (n_y, n_x)."""
        nx, ny = self.states[k]
        return np.outer(self.hy[ny], self.hx[nx])

    def eval_matrix(self):
        """Dense (n_states, n_y*n_x) matrix of sampled basis functions."""
        return np.stack([self.state_on_grid(k).ravel() for k in range(self.n_states)])

    def quad_weights(self):
        """Quadrature weights per grid point (uniform rule on the decayed domain)."""
        return np.full((self.grid.n_y, self.grid.n_x), self.grid.cell_area)

    def derivative_tables(self):
        """(dhx, dhy) with dh[n] = h_n'(x) from h_n' = (sqrt(n) h_{n-1} - sqrt(n+1) h_{n+1})/sqrt(2)."""
        return _derivative_table(self.hx, self.n_max), _derivative_table(self.hy, self.n_max)


def _derivative_table(h, n_max):
    d = np.empty((n_max + 1, h.shape[1]))
    for n in range(n_max + 1):
        d[n] = -np.sqrt((n + 1) / 2.0) * h[n + 1]
        if n >= 1:
            d[n] += np.sqrt(n / 2.0) * h[n - 1]
    return d


def build_basis(n_max, grid=None):
    """Construct the basis; rejects grids that cannot represent it faithfully.

    A grid fails if the spacing violates the Nyquist limit for h_{n_max} or if
    the 1D Gram matrices deviate from the identity by more than 1e-10 (domain
    truncated before the basis functions decay).
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if n_max > MAX_HERMITE_ORDER:
        raise ValueError(f"n_max {n_max} exceeds supported maximum {MAX_HERMITE_ORDER}")
    if grid is None:
        grid = default_basis_grid(n_max)

    nyquist = np.pi / (2.0 * np.sqrt(2.0 * n_max + 1.0))
    if grid.dx > nyquist or grid.dy > nyquist:
        raise ValueError(
            f"grid too coarse to resolve h_{n_max}: spacing "
            f"({grid.dx:.4f}, {grid.dy:.4f}) exceeds Nyquist limit {nyquist:.4f}")

    hx = hermite_table(n_max + 1, grid.x)
    hy = hermite_table(n_max + 1, grid.y)
    for name, h, w in (("x", hx, grid.dx), ("y", hy, grid.dy)):
        gram = (h[: n_max + 1] * w) @ h[: n_max + 1].T
        err = np.abs(gram - np.eye(n_max + 1)).max()
        if err > ORTHONORMALITY_TOL / 2.0:
            raise ValueError(
                f"quadrature on the {name}-axis is not orthonormal to "
                f"{ORTHONORMALITY_TOL:g} (deviation {err:.2e}); enlarge the domain")

    return BasisSet(n_max=n_max, states=enumerate_states(n_max), grid=grid, hx=hx, hy=hy)


def _rect_from_states(basis, c):
    """Scatter the triangular coefficient list into an (n+1, n+1) array [nx, ny]."""
    rect = np.zeros((basis.n_max + 1, basis.n_max + 1), dtype=np.complex128)
    for k, (nx, ny) in enumerate(basis.states):
        rect[nx, ny] = c[k]
    return rect


def _states_from_rect(basis, rect):
    return np.array([rect[nx, ny] for nx, ny in basis.states])


def grid_to_coeffs(psi, basis):
    """Project a field onto the basis: c_k = <h_k | psi> by quadrature."""
    if isinstance(psi, Wavefunction):
        if not psi.grid.same_points(basis.grid):
            raise ValueError("field grid does not match the basis quadrature grid")
        values = psi.values
    else:
        values = np.asarray(psi, dtype=np.complex128)
        if values.shape != (basis.grid.n_y, basis.grid.n_x):
            raise ValueError("field shape does not match the basis quadrature grid")
    hxw = basis.hx[: basis.n_max + 1] * basis.grid.dx
    hyw = basis.hy[: basis.n_max + 1] * basis.grid.dy
    rect = hxw @ values.T @ hyw.T  # [nx, ny]
    return _states_from_rect(basis, rect)


def coeffs_to_grid(c, basis, grid=None):
    """Evaluate psi(x,y) = sum_k c_k h_{n_x(k)}(x) h_{n_y(k)}(y) on a grid.

    Defaults to the basis quadrature grid; pass another grid (e.g. the
    propagation field of view) to resample the same state there.
    """
    c = np.asarray(c, dtype=np.complex128)
    if c.shape != (basis.n_states,):
        raise ValueError(f"expected {basis.n_states} coefficients, got {c.shape}")
    if grid is None or grid.same_points(basis.grid):
        grid = basis.grid
        hx, hy = basis.hx, basis.hy
    else:
        hx = hermite_table(basis.n_max, grid.x)
        hy = hermite_table(basis.n_max, grid.y)
    rect = _rect_from_states(basis, c)
    values = (hy[: basis.n_max + 1].T @ rect.T) @ hx[: basis.n_max + 1]
    return Wavefunction(values, grid)
