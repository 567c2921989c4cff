"""Spectral solver suite for 2D Bose-Einstein condensates with balanced
gain-loss (PT-symmetric) potentials: stationary states, Bogoliubov-de Gennes
stability, and split-operator real-time dynamics."""

__version__ = "0.1.0"

from .basis import (BasisSet, GridSpec, Wavefunction, build_basis, coeffs_to_grid,
                    default_basis_grid, default_grid, extended_grid, grid_to_coeffs,
                    hermite_function)
from .bdg import BdgSpectrum, bdg_spectrum, build_bdg_matrix, solve_bdg, stability_sweep
from .config import RunConfig, g_from_physical, load_config, serialize_config
from .dynamics import (PropagationConfig, Trajectory, evolve, offcenter_vortex,
                       precession_experiment, split_step, track_vortex)
from .errors import (AmplitudeTooSmallError, BlowUpError, ConfigError,
                     ConvergenceError, JacobianSingularError, LostVortexError)
from .observables import (CurrentField, azimuthal_current, continuity_residual,
                          current_density, density_field, phase_field, winding_number)
from .potential import (PotentialKind, PotentialSpec, complex_on_grid, evaluate_imaginary,
                        evaluate_trap, imaginary_on_grid, is_pt_symmetric)
from .stationary import (BranchLabel, SpectrumBranch, StationaryState, classify_state,
                         continue_branch, energy_split, gpe_residual, initial_guess,
                         locate_bifurcation, solve_stationary, state_overlap)

__all__ = [name for name in dir() if not name.startswith("_")]
