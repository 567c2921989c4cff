"""Offline figure pipeline for the ptvortex solver's data products."""

__version__ = "0.1.0"

from .formats import (Field, read_branch_csv, read_gpe2, read_stability_csv,
                      read_trajectory_csv, sha256, write_gpe2)
from .recipes import RECIPES, FigureRecipe, render
