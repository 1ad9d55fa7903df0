"""Focusing cubic NLS on a three-edge star graph.

Solvers for i dPsi/dt = H Psi - |Psi|^2 Psi where H is the Laplacian on
three half-lines joined at a vertex under Kirchhoff, delta, or delta-prime
coupling, plus the measurement harness for fast-soliton scattering: the
outgoing waves carry the linear scattering coefficients, with errors that
shrink as the velocity grows.
"""

__version__ = "0.1.0"

from .graph import (
    CouplingKind,
    GraphField,
    GridSpec,
    InvalidParameterError,
    VertexCoupling,
    boundary_residual,
    edge_masses,
    energy,
    far_end_mass,
    lp_norm,
    mass,
)
from .linops import (
    NumericFailureError,
    RescaledCoefficients,
    ScatteringCoefficients,
    apply_linear_propagator,
    apply_two_edge_propagator,
    coupling_for_rescaled,
    dispersive_decay_probe,
    fit_loglog_slope,
    kernel_identity_check,
    rescaled_coefficients,
    resolvent_kernel,
    scattering_coefficients,
)
from .evolution import (
    EvolveConfig,
    EvolutionTrace,
    TruncationViolationError,
    crank_nicolson_step,
    evolve,
    nonlinear_phase_step,
    strang_step,
)
from .reference import (
    PhaseSchedule,
    ReferenceBundle,
    SolitonParams,
    advance_bundle,
    free_line_nls_evolve,
    incoming_part,
    incoming_reference,
    initial_datum,
    moving_soliton,
    outgoing_part,
    outgoing_reference_bundle,
    phase_schedule,
    smooth_ramp,
    soliton_profile,
    superposition_reference,
    tail_mass,
)
from .experiments import (
    CheckResult,
    ExperimentConfig,
    ExperimentReport,
    SweepResult,
    SweepRow,
    run_scattering_experiment,
    run_sweep,
    verify,
)
from .checkpoint import (
    CheckpointError,
    CorruptHeaderError,
    ShapeMismatchError,
    VersionMismatchError,
    load_field,
    save_field,
)

__all__ = [
    "__version__",
    "CouplingKind",
    "GraphField",
    "GridSpec",
    "InvalidParameterError",
    "VertexCoupling",
    "boundary_residual",
    "edge_masses",
    "energy",
    "far_end_mass",
    "lp_norm",
    "mass",
    "NumericFailureError",
    "RescaledCoefficients",
    "ScatteringCoefficients",
    "apply_linear_propagator",
    "apply_two_edge_propagator",
    "coupling_for_rescaled",
    "dispersive_decay_probe",
    "fit_loglog_slope",
    "kernel_identity_check",
    "rescaled_coefficients",
    "resolvent_kernel",
    "scattering_coefficients",
    "EvolveConfig",
    "EvolutionTrace",
    "TruncationViolationError",
    "crank_nicolson_step",
    "evolve",
    "nonlinear_phase_step",
    "strang_step",
    "PhaseSchedule",
    "ReferenceBundle",
    "SolitonParams",
    "advance_bundle",
    "free_line_nls_evolve",
    "incoming_part",
    "incoming_reference",
    "initial_datum",
    "moving_soliton",
    "outgoing_part",
    "outgoing_reference_bundle",
    "phase_schedule",
    "smooth_ramp",
    "soliton_profile",
    "superposition_reference",
    "tail_mass",
    "CheckResult",
    "ExperimentConfig",
    "ExperimentReport",
    "SweepResult",
    "SweepRow",
    "run_scattering_experiment",
    "run_sweep",
    "verify",
    "CheckpointError",
    "CorruptHeaderError",
    "ShapeMismatchError",
    "VersionMismatchError",
    "load_field",
    "save_field",
]
