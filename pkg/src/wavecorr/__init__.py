"""Numerical laboratory for constrained path-integral wave-function correlators."""

__version__ = "0.1.0"

from .lattice import (
    BoundaryPair,
    DiscreteWaveFunction,
    LatticeSpec,
    LatticeWarning,
    WaveHistory,
    constant_history,
    inner,
    locality_score,
    make_gaussian,
    make_homogeneous,
    make_inhomogeneous,
    random_wave,
)
from .operators import (
    HamiltonianSpec,
    PairValidation,
    eigenstates,
    expectations,
    hamiltonian_matrix,
    momentum_matrix,
    validate_boundary_pair,
)
from .propagator import (
    PropagatorSpec,
    admits_local_solutions,
    propagate,
    schrodinger_residual,
    step_matrix,
)
from .measure import (
    FluctuationScaling,
    MeasureFloorError,
    QuadratureBudgetError,
    QuadratureConvergenceError,
    action_numerator,
    action_phase,
    amplitude_floor,
    edge_action,
    fluctuation_scaling,
    gradient_norm,
    measure_log_density,
    phase_gradient,
)
from .ratios import (
    RatioInputs,
    ThresholdReport,
    alpha_threshold,
    contribution_ratio_asymptotic,
    contribution_ratio_exact,
    contribution_ratio_reduced,
    homogeneous_contribution,
    inhomogeneous_contribution,
    log_contribution_ratio_asymptotic,
    log_contribution_ratio_exact,
    reduced_log_ratio,
)
from .correlator import (
    AmplitudeGrid,
    CorrelatorEstimate,
    GridBudgetError,
    HistoryFamily,
    FamilyComparison,
    FamilyContribution,
    build_collapse_family,
    build_frozen_family,
    build_schrodinger_family,
    compare_history_families,
    compositions,
    correlator_bruteforce,
    correlator_metropolis,
    family_log_contribution,
)
from .experiments import (
    DEFAULTS,
    KINDS,
    BornSetup,
    CheckResult,
    ClaimRow,
    DataSeries,
    ExperimentConfig,
    ResultRecord,
    RunManifest,
    born_rule_setup,
    load_summary,
    run_experiment,
    verify_claims,
    write_run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
