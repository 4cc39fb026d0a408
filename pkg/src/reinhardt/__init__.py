"""Bergman spaces, kernels and curvature of the unbounded Reinhardt domains D(a)."""

from .domain import DomainSpec, contains, f_asymptotic, f_exact, radial_interval, sample_points
from .geometry import (
    KernelForm,
    b_function,
    cartan_conditions,
    check_transformation_law,
    kernel_eval,
    metric_at,
    rescale_to_fubini_study,
    sectional_curvature,
    t_matrix,
)
from .quadrature import QuadratureConfig, QuadratureOutcome, Verdict, integrate_half_line, probe_divergence
from .space import (
    KernelCoefficients,
    bergman_dimension,
    enumerate_basis,
    is_square_integrable,
    kernel_coefficients,
    monomial_norm_sq,
)

__version__ = "0.1.0"
