"""Fast prediction of localized low-lying eigenfunctions from smoothed potentials.

The smoothed potential W_t = k_t * V is computed with two FFTs and compared
against the landscape function 1/u, (L + V) u = 1, and against directly
computed eigenfunctions of L + V on a periodic grid.
"""

from .eigen import EigenSet, dense_eigen_oracle, localization_center, smallest_eigenpairs
from .fieldio import read_field, write_field
from .grid import (GridShape, PotentialSpec, ScalarField, UnitConvention, lp_difference, make_potential,
                   normalize01)
from .landscape import ConvergenceError, LandscapeResult, PositivityError, effective_potential, solve_landscape
from .operators import (DiscreteBiLaplacian, DiscreteLaplacian, SpectralFractional, apply_schrodinger,
                        dense_matrix, operator_symbol, parse_operator, rayleigh_quotient)
from .smoothing import (AveragedHeat, Box, Gaussian, fefferman_phong_radius, filter_symbol, kernel_profile,
                        smooth_potential, suggest_t)
from .spectral import SpectralField, SymbolTable, apply_multiplier, fft2, ifft2
from .stats import (StatsRecord, dismissed_min, eig_rat, find_local_minima, first_miss_eig, first_miss_min,
                    match, summarize)

__version__ = "0.1.0"
