"""Harmonic trap and the family of imaginary gain-loss potentials.

The full complex potential is V = V_T + i*Gamma*V_I with V_T = x^2 + y^2.
All built-in imaginary parts put gain (V_I > 0) on the right and loss on
the left, driving a particle current from right to left.  The PT_BROKEN_C
variant scales the gain Gaussian by ``gain_factor`` (default 1.2) while
keeping the loss peak mirrored at -d, so gain exceeds loss.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .basis import GridSpec


class PotentialKind(str, enum.Enum):
    A = "A"              # x exp(-r^2)
    B = "B"              # x^3 exp(-r^2)
    C = "C"              # exp(-(x-d)^2-y^2) - exp(-(x+d)^2-y^2)
    PT_BROKEN_C = "PT_BROKEN_C"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class PotentialSpec:
    kind: PotentialKind
    d: float = 0.0
    gamma: float = 0.0
    gain_factor: float = None
    custom_values: np.ndarray = field(default=None, repr=False)
    custom_grid: GridSpec = None

    def __post_init__(self):
        kind = PotentialKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.gain_factor is None:
            object.__setattr__(
                self, "gain_factor", 1.2 if kind is PotentialKind.PT_BROKEN_C else 1.0)
        if kind in (PotentialKind.C, PotentialKind.PT_BROKEN_C) and self.d < 0:
            raise ValueError("gain-loss peak offset d must be non-negative")
        # gamma < 0 is permitted (it swaps the gain and loss sides, which the
        # complex-conjugation symmetry maps back onto gamma > 0); configured
        # runs restrict to gamma >= 0 at the config layer
        if kind is PotentialKind.CUSTOM:
            if self.custom_values is None or self.custom_grid is None:
                raise ValueError("CUSTOM potential requires custom_values and custom_grid")
            vals = np.asarray(self.custom_values, dtype=np.complex128)
            if vals.shape != (self.custom_grid.n_y, self.custom_grid.n_x):
                raise ValueError("custom potential table does not match its grid")
            object.__setattr__(self, "custom_values", vals)

    def replace_gamma(self, gamma):
        return PotentialSpec(self.kind, d=self.d, gamma=gamma,
                             gain_factor=self.gain_factor,
                             custom_values=self.custom_values,
                             custom_grid=self.custom_grid)

    def replace_d(self, d):
        return PotentialSpec(self.kind, d=d, gamma=self.gamma,
                             gain_factor=self.gain_factor,
                             custom_values=self.custom_values,
                             custom_grid=self.custom_grid)


def evaluate_trap(x, y):
    """Harmonic trap x^2 + y^2 in oscillator units."""
    return np.asarray(x) ** 2 + np.asarray(y) ** 2


def evaluate_imaginary(spec, x, y):
    """Gain-loss profile V_I(x, y) for the analytic potential kinds."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    kind = spec.kind
    if kind is PotentialKind.A:
        return x * np.exp(-(x**2 + y**2))
    if kind is PotentialKind.B:
        return x**3 * np.exp(-(x**2 + y**2))
    if kind is PotentialKind.C:
        return np.exp(-((x - spec.d) ** 2) - y**2) - np.exp(-((x + spec.d) ** 2) - y**2)
    if kind is PotentialKind.PT_BROKEN_C:
        return (spec.gain_factor * np.exp(-((x - spec.d) ** 2) - y**2)
                - np.exp(-((x + spec.d) ** 2) - y**2))
    if kind is PotentialKind.CUSTOM:
        raise ValueError("CUSTOM potentials are tabulated; use complex_on_grid")
    raise ValueError(f"unknown potential kind {kind!r}")


def imaginary_on_grid(spec, grid):
    if spec.kind is PotentialKind.CUSTOM:
        if not grid.same_points(spec.custom_grid):
            raise ValueError("custom potential tabulated on a different grid")
        return spec.custom_values.imag.copy()
    X, Y = grid.meshgrid()
    return evaluate_imaginary(spec, X, Y)


def complex_on_grid(spec, grid):
    """Full complex potential V_T + i*Gamma*V_I sampled on the grid.

    For CUSTOM specs the tabulated values are returned as-is (they replace
    the trap as well, which allows e.g. free-particle propagation tests).
    """
    if spec.kind is PotentialKind.CUSTOM:
        if not grid.same_points(spec.custom_grid):
            raise ValueError("custom potential tabulated on a different grid")
        return spec.custom_values.copy()
    X, Y = grid.meshgrid()
    return evaluate_trap(X, Y) + 1j * spec.gamma * evaluate_imaginary(spec, X, Y)


def is_pt_symmetric(spec, grid, tol=1e-12):
    """True iff max_grid |V(-x,y) - conj(V(x,y))| < tol."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    v = complex_on_grid(spec, grid)
    if spec.kind is PotentialKind.CUSTOM:
        # endpoint-free symmetric grid: x -> -x is index ix -> (n_x - ix) mod n_x
        mirrored = np.roll(v[:, ::-1], 1, axis=1)
    else:
        X, Y = grid.meshgrid()
        mirrored = evaluate_trap(-X, Y) + 1j * spec.gamma * evaluate_imaginary(spec, -X, Y)
    return bool(np.abs(mirrored - np.conj(v)).max() < tol)
