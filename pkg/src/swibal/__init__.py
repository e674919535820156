"""Gramian-based analysis and balanced truncation for continuous-time
linear switched systems.

The pipeline: build or load a switched model, solve the generalized
Lyapunov equations for its reachability and observability Gramians, decide
reachability/observability from the Gramian ranges, and compute a reduced
model by square-root balanced truncation with an a-priori L2 output error
bound. Simulation utilities evaluate the bound on concrete switching
scenarios.
"""

__version__ = "0.1.0"

from ._kernels import active_backend_name
from .balred import (
    AssumptionReport,
    BalancedReduction,
    StabilityCertificate,
    balance_truncate,
    check_assumption1,
    error_bound,
    hankel_singular_values,
    project_model,
    quadratic_stability_certificate,
)
from .exceptions import (
    BiorthogonalityViolatedError,
    DegenerateGramiansError,
    DimensionTooLargeError,
    DivergedError,
    NearSingularError,
    NotHurwitzError,
    NotPositiveDefiniteError,
    OrderCapWarning,
    OrderTooLargeError,
    SimulationOverflowError,
    SingularKroneckerMatrixError,
    SwibalError,
    TruncationTieWarning,
)
from .families import (
    example1,
    example2,
    example2_scenario,
    random_dissipative_model,
    random_rank_stable_model,
    random_stable_model,
    random_structured_model,
)
from .gramians import (
    AveragedGramians,
    GramianResult,
    RankVerdict,
    SubspaceBasis,
    averaged_gramians,
    dual_model,
    is_completely_observable,
    is_completely_reachable,
    max_principal_angle,
    obs_gramian,
    psd_factor,
    range_basis,
    reach_gramian,
    subspace_contains,
)
from .lyapsolve import (
    ExistenceDiagnostic,
    GenSolveOptions,
    GenSolveReport,
    LyapunovSolver,
    existence_margin,
    residual,
    series_terms,
    solve_generalized,
    solve_generalized_fixedpoint,
    solve_generalized_kron,
    solve_lyapunov,
)
from .model import (
    BilinearEmbedding,
    ConstantInput,
    Diagnostic,
    InputSignal,
    LssModel,
    Mode,
    SampledInput,
    Scenario,
    SineDecayInput,
    SwitchingSignal,
    ZeroInput,
    bilinear_embed,
    extended_input,
    input_from_dict,
    load_model,
    load_scenario,
    mode_at,
    save_model,
    save_scenario,
    spectral_abscissa,
    validate_model,
)
from .oracle import (
    ClosureResult,
    embedded_closure,
    observable_space_bruteforce,
    reachable_space_bruteforce,
)
from .sim import (
    ErrorSummary,
    Trajectory,
    l2_norm_input,
    l2_norm_output,
    output_error,
    simulate_bilinear,
    simulate_switched,
)

__all__ = [
    "AssumptionReport",
    "AveragedGramians",
    "BalancedReduction",
    "BilinearEmbedding",
    "BiorthogonalityViolatedError",
    "ClosureResult",
    "ConstantInput",
    "DegenerateGramiansError",
    "Diagnostic",
    "DimensionTooLargeError",
    "DivergedError",
    "ErrorSummary",
    "ExistenceDiagnostic",
    "GenSolveOptions",
    "GenSolveReport",
    "GramianResult",
    "InputSignal",
    "LssModel",
    "LyapunovSolver",
    "Mode",
    "NearSingularError",
    "NotHurwitzError",
    "NotPositiveDefiniteError",
    "OrderCapWarning",
    "OrderTooLargeError",
    "RankVerdict",
    "SampledInput",
    "Scenario",
    "SimulationOverflowError",
    "SineDecayInput",
    "StabilityCertificate",
    "SubspaceBasis",
    "SwibalError",
    "SwitchingSignal",
    "Trajectory",
    "TruncationTieWarning",
    "ZeroInput",
    "active_backend_name",
    "averaged_gramians",
    "balance_truncate",
    "bilinear_embed",
    "check_assumption1",
    "dual_model",
    "embedded_closure",
    "error_bound",
    "example1",
    "example2",
    "example2_scenario",
    "existence_margin",
    "extended_input",
    "hankel_singular_values",
    "input_from_dict",
    "is_completely_observable",
    "is_completely_reachable",
    "l2_norm_input",
    "l2_norm_output",
    "load_model",
    "load_scenario",
    "max_principal_angle",
    "mode_at",
    "obs_gramian",
    "output_error",
    "project_model",
    "psd_factor",
    "quadratic_stability_certificate",
    "random_dissipative_model",
    "random_rank_stable_model",
    "random_stable_model",
    "random_structured_model",
    "range_basis",
    "reach_gramian",
    "residual",
    "save_model",
    "save_scenario",
    "series_terms",
    "simulate_bilinear",
    "simulate_switched",
    "solve_generalized",
    "solve_generalized_fixedpoint",
    "solve_generalized_kron",
    "solve_lyapunov",
    "spectral_abscissa",
    "subspace_contains",
    "validate_model",
]
