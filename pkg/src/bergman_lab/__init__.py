"""Numerical laboratory for the harmonic Bergman projection on the unit ball.

The package has three layers:

* geometry, quadrature, and scalar fields on the disk and the 3-ball
  (:mod:`~bergman_lab.geometry`, :mod:`~bergman_lab.quadrature`,
  :mod:`~bergman_lab.fields`, :mod:`~bergman_lab.profiles`);
* the projection kernel and its three evaluation routes, plus a calculus of
  backward-flow averages and tangential decompositions
  (:mod:`~bergman_lab.kernels`, :mod:`~bergman_lab.flows`);
* reproducible experiment runners with CSV/JSON reports and a command line
  (:mod:`~bergman_lab.experiments`, ``bergman-lab`` /
  ``python -m bergman_lab``).

Everything numerical states its trust region and refuses to extrapolate
outside it: under-resolved quadrature, kernel evaluation too close to the
boundary, and inputs violating a mathematical precondition raise typed errors
from :mod:`~bergman_lab.exceptions` rather than degrade silently.
"""

from .exceptions import (
    BergmanLabError,
    DomainError,
    NumericError,
    PreconditionError,
    RefusalError,
    UsageError,
)
from .geometry import (
    BallDomain,
    TangentialSpanningSet,
    VectorFieldSpec,
    ball_volume,
    defining_function,
    radial_field,
    rotation_field,
    spanning_set_for_ball,
)
from .fields import (
    ModeField,
    ScalarField,
    Support,
    apply_partial,
    apply_tuple,
    apply_vector_field,
    build_bump_cutoff,
    build_counterexample,
    constant_field,
    harmonic_monomial,
    harmonicity_residual,
    laplacian,
    monomial_field,
    polynomial_field,
)
from .quadrature import (
    NormReport,
    QuadratureRule,
    ball3_rule,
    disk_rule,
    inner_product,
    lebesgue_norm,
    norm,
    sobolev_norm,
    tangential_sobolev_norm,
    weighted_norm,
)
from .kernels import (
    BasisExpansion,
    analytic_kernel_disk,
    commutator_residual,
    harmonic_kernel,
    idempotence_residual,
    kernel_decomposition_residual,
    kernel_matrix,
    kernel_section,
    project_basis_disk,
    project_kernel,
    project_kernel_quadrature,
    project_via_analytic,
    self_adjointness_residual,
)
from .flows import (
    AOperator,
    CollarSpec,
    DecompositionResult,
    FlowMap,
    apply_A,
    boundary_hit_time,
    flow_map_eval,
    ftc_residual,
    iterated_antiderivative_residual,
    laplace_split_residual,
    prop_decompose,
    transversal_solve_residual,
    weighted_bound_probe,
)
from .experiments import (
    ExperimentConfig,
    ReportRow,
    cmd_decomposition_check,
    cmd_disk_counterexample,
    cmd_kernel_check,
    cmd_smoothing_ratios,
    run_selected,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "BergmanLabError", "UsageError", "DomainError", "PreconditionError",
    "RefusalError", "NumericError",
    # geometry
    "BallDomain", "VectorFieldSpec", "TangentialSpanningSet",
    "defining_function", "ball_volume", "radial_field", "rotation_field",
    "spanning_set_for_ball",
    # fields
    "Support", "ScalarField", "ModeField", "constant_field", "monomial_field",
    "polynomial_field", "harmonic_monomial", "build_counterexample",
    "build_bump_cutoff", "apply_partial", "apply_vector_field", "apply_tuple",
    "laplacian", "harmonicity_residual",
    # quadrature and norms
    "QuadratureRule", "NormReport", "disk_rule", "ball3_rule", "inner_product",
    "norm", "lebesgue_norm", "sobolev_norm", "tangential_sobolev_norm",
    "weighted_norm",
    # kernel and projections
    "harmonic_kernel", "kernel_matrix", "analytic_kernel_disk",
    "kernel_decomposition_residual", "kernel_section", "BasisExpansion",
    "project_kernel", "project_kernel_quadrature", "project_basis_disk",
    "project_via_analytic", "commutator_residual", "self_adjointness_residual",
    "idempotence_residual",
    # flows and decompositions
    "CollarSpec", "FlowMap", "flow_map_eval", "boundary_hit_time", "AOperator",
    "apply_A", "ftc_residual", "laplace_split_residual",
    "iterated_antiderivative_residual", "DecompositionResult",
    "prop_decompose", "weighted_bound_probe", "transversal_solve_residual",
    # experiments
    "ExperimentConfig", "ReportRow", "cmd_kernel_check",
    "cmd_disk_counterexample", "cmd_smoothing_ratios",
    "cmd_decomposition_check", "run_selected", "write_report",
]
