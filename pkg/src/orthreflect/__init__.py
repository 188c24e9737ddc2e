"""Reflection (Skorohod) maps on the nonnegative orthant for discretized paths."""
from .analysis import (
    INCONCLUSIVE,
    SATISFIED,
    VIOLATED,
    ConditionVerdict,
    CouplingResult,
    coupling_time,
    ks_distance,
    map_mean_drift,
    mean_drift,
    necessary_condition,
    regulator_divergence,
    stability_check,
    sufficient_condition,
)
from .dynamic import (
    DynamicCoefficients,
    EnvelopeFunction,
    coupling_experiment,
    envelope_divergence,
    feedforward_subproblem,
    reflect_dynamic,
    regulator_lower_bound,
    transformed_difference,
    validate_assumptions,
)
from .errors import ConvergenceError, InvalidRoutingError, ModelError, ValidationError
from .experiments import (
    SCHEMA,
    ExperimentConfig,
    catalog_coefficients,
    ergodic_sample,
    load_config,
    report_series,
    report_to_json,
    run_experiment,
)
from .mmatrix import RoutingMatrix, load_matrix, neumann_inverse, normalize_diagonal, save_matrix, spectral_radius
from .paths import (
    TimeGrid,
    VectorPath,
    path_from_csv,
    path_to_csv,
    shift,
    solution_from_csv,
    solution_to_csv,
    uniform_grid,
)
from .processes import (
    Brownian,
    Deterministic,
    Empirical,
    Exponential,
    Fixture,
    LevyCP,
    Map,
    RenewalRisk,
    Uniform,
    critical_premium,
    fixture,
    generate,
    spec_from_dict,
    stationary_distribution,
)
from .skorohod import (
    DifferenceReport,
    ReflectionSolution,
    audit_solution,
    difference_diagnostics,
    reflect,
    reflect_fixed_point,
    reflect_general,
    regulator_bounds,
)

__version__ = "0.1.0"
