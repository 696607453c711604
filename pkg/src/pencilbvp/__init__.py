"""Half-line solver and solvability certifier for fourth-order operator ODEs
whose principal part factors as (-d/dt + A)(d/dt + A)^3 with a triple
characteristic root at -A.

The library solves P0 u + sum_j A_j u^{(4-j)} = f on [0, inf) with vanishing
value, first and second derivative at 0, in exponentially weighted L2 spaces,
and certifies unique solvability from closed-form constants built on
gamma = 1 - kappa^2/(4 lambda0^2).
"""

from .certificates import (SolvabilityCertificate, Verdict, certify, constants,
                           critical_sweep, gamma)
from .errors import (BoundaryConditionViolated, ConfigInvalid, DimensionMismatch,
                     GridTooSmall, InadmissibleWeight, NegativeTime,
                     NotContractive, NotInDomain, NotPositiveDefinite,
                     NotSymmetric, PencilBVPError, ResidualTooLarge)
from .grids import (Grid, WeightedGridFunction, default_truncation, derivative,
                    fd_weights, grid_function, l2k_norm, make_grid, sobolev_norm,
                    trace_norms)
from .operators import (OperatorModel, PerturbationSet, frac_power, make_operator,
                        make_perturbations, op_norm, operator_from_spectrum,
                        semigroup_apply, zero_perturbations)
from .pencil import (PENCIL_COEFFICIENTS, bound_A4, bound_xi4, make_xi_grid,
                     resolvent_apply, symbol, symbol_lower_bound)
from .perturbed import apply_P1, neumann_solve
from .principal import (BoundaryCorrection, SolveReport, apply_P0, assemble_solution,
                        boundary_phis, fullline_solve, principal_solve)
from .verification import (check_aux_estimates, check_energy_identity,
                           check_estimate_16, check_norm_equivalence,
                           check_P0_boundedness, random_operator,
                           random_wbar4_function, random_zero_value_function)

__version__ = "0.1.0"
