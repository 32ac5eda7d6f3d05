"""Optimal covariant phase estimation for degenerate integer-spectrum generators."""
from .cost import (CostModel, XiMatrix, average_cost_quadrature, builtin_cost,
                   cost_operator_matrix, evaluate_cost, min_cost, optimal_xi)
from .errors import PhasekitError
from .optimizer import (EigenSolution, TwoModeSolution, chebyshev_state, find_matching_branches,
                        matching_residual, mean_photon_number, optimal_state_numeric,
                        optimize_two_mode, recursion_residual_w, two_mode_coeffs)
from .bessel import bessel_j
from .pom import conditional_density, discrete_pom_zq, e_vector, pom_completeness_residual
from .simulate import SimulationRun, covariance_test, empirical_cost, sample_estimates
from .spectrum import (Generator, ReducedState, Spectrum, multipath_degeneracy_set,
                       partition_count, project_to_reduced, symmetrized_vector,
                       two_mode_lambda_basis)

__version__ = "0.1.0"
