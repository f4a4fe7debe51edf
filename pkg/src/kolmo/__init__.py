"""Numerical calculus for degenerate Kolmogorov operators.

Homogeneous group structure, explicit Gaussian fundamental solutions,
the intrinsic second-order Taylor expansion with its flow-path planner,
Dini-modulus machinery, and a manufactured-solution harness that checks
the interior estimate inequalities at desk scale.
"""

from .errors import (
    AccuracyError,
    ApplicabilityError,
    DefinitenessError,
    DimensionError,
    DomainError,
    EllipticityError,
    HypoellipticityError,
    KolmoError,
    ManufactureError,
    NonConvergenceError,
    PlanIntegrityError,
    SolveError,
    StructureError,
    SupportError,
    SymmetryError,
    UsageError,
)
from .group import (
    BlockStructure,
    Exponents,
    OperatorSpec,
    Point,
    compose,
    compose_r,
    dilate,
    estimate_triangle_constant,
    heat_spec,
    hormander_check,
    inverse,
    kdist,
    knorm,
    kolmogorov_spec,
    level_exponents,
    level_map_solve,
    load_spec,
    make_spec,
    origin,
    principal_B,
    project_level,
    sample_ball,
    scaled_B,
    validate_structure,
)
from .kernel import (
    Covariance,
    KernelContext,
    annulus_sup,
    check_bounds,
    check_homogeneity,
    check_kernel_pde,
    covariance,
    gamma,
    gamma_Y,
    gamma_grad,
    gamma_hess,
    gamma_hess_m,
    kernel_mass,
)
from .matrixcalc import (
    SpdReport,
    integrate_matrix,
    mat_exp,
    spd_min_eigen,
    sqrt_spd,
)
from .modulus import (
    DiniReport,
    ModulusTable,
    counterexample_certificate,
    counterexample_f,
    counterexample_mixed,
    counterexample_u,
    dini_integral,
    empirical_modulus,
    holder_closed_form,
    holder_seminorm,
    power_table,
    schauder_functional,
    table_from_function,
)
from .taylor import (
    C2Bundle,
    PathPlan,
    PathSegment,
    connect,
    coordinate_bundle,
    endpoint_error,
    flow_X,
    flow_Y,
    gamma_traj,
    gaussian_bundle,
    lie_derivative_fd,
    quadratic_bundle,
    remainder_profile,
    taylor2,
    traj_increment,
    validate_bundle,
    verify_plan,
)
from .verify import (
    EstimateReport,
    ManufacturedProblem,
    apply_L_fd,
    convolve_solution,
    cutoff_eta,
    cutoff_gradient_report,
    harmonic_family,
    manufacture,
    verify_apriori,
    verify_invariance,
    verify_mean_value,
    verify_schauder_const,
    verify_schauder_var,
    verify_singular_bounds,
)

__version__ = "0.1.0"
