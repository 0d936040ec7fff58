"""Unitary simulation of qubit teleportation with an explicit measuring probe."""

__version__ = "0.1.0"

from .errors import (
    BadFactorIndex,
    CompletionFailure,
    DimensionMismatch,
    InvalidDensityOperator,
    NonFiniteParameter,
    NotNormalized,
    NotOrthonormalInput,
    QTeleportError,
)
from .tensor import (
    TOL_NORM,
    TOL_UNITARY,
    DensityOperator,
    complete_to_unitary,
    dagger,
    embed,
    fidelity,
    haar_random_qubit,
    kron,
    partial_trace,
    projector,
)
from .protocol import (
    BellBasis,
    CorrectionBranches,
    PremeasurementSpec,
    ProtocolReport,
    QubitState,
    bell_basis,
    build_U,
    build_W,
    build_W_theta,
    coincidence_observable,
    correction_branches,
    fidelity_theta_closed_form,
    lueders_spec,
    post_measurement_state,
    reduced_states,
    run_protocol,
    theta_mixture,
)
from .experiments import (
    SweepRow,
    TrialSummary,
    coverage_report,
    random_trials,
    sweep_theta,
)
