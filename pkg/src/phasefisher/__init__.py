"""Quantum Fisher information of lossy two-mode interferometry.

Closed forms for entangled-coherent and NOON probes with and without a
phase reference, a brute-force oracle on the truncated Fock space that
validates every one of them, and a CLI for sweeps and crossing searches.
"""

from .channels import (
    SINGLE_ARM,
    TWO_ARM,
    LossChannel,
    PhaseGenerator,
    apply_loss,
    apply_loss_via_bs,
    apply_loss_vector,
    apply_phase,
    phase_average,
    single_arm_generator,
    two_arm_generator,
)
from .exceptions import (
    DegenerateSpectrum,
    DimensionMismatch,
    InvalidEta,
    InvalidWeights,
    NegativeEigenvalue,
    NoConvergence,
    NoCrossingFound,
    NonpositiveFisher,
    NotHermitian,
    PhaseFisherError,
    TruncationTooSmall,
)
from .fock_core import (
    DensityOperator,
    FockTruncation,
    ModeOperator,
    StateVector,
    annihilation,
    coherent_vector,
    creation,
    default_truncation,
    eigendecompose_hermitian,
    number_operator,
    partial_trace,
    truncation_for_tolerance,
)
from .qfi_analytic import (
    EcsLossySpectrum,
    QFIResult,
    basis_overlap_matrix,
    qfi_ecs_noref,
    qfi_ecs_noref_blocksum,
    qfi_ecs_ref,
    qfi_ecs_ref_asymptotic,
    qfi_ecs_ref_reduced,
    qfi_noon,
    qfi_noon_continuous,
    qfi_two_level,
    sensitivity,
    sigma_spectrum,
)
from .qfi_oracle import (
    WITH_REFERENCE,
    WITHOUT_REFERENCE,
    CheckResult,
    OracleConfig,
    Scenario,
    VerificationReport,
    build_scenario,
    qfi_numeric,
    scenario_mixture,
    scenario_qfi,
    two_level_matrix_numeric,
    verify_all,
)
from .states import (
    EcsScalars,
    ProbeSpec,
    alpha_for_mean_photon,
    ecs_normalization,
    ecs_scalars,
    ecs_vector,
    mean_photon_number,
    noon_vector,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "DegenerateSpectrum",
    "DensityOperator",
    "DimensionMismatch",
    "EcsLossySpectrum",
    "EcsScalars",
    "FockTruncation",
    "InvalidEta",
    "InvalidWeights",
    "LossChannel",
    "ModeOperator",
    "NegativeEigenvalue",
    "NoConvergence",
    "NoCrossingFound",
    "NonpositiveFisher",
    "NotHermitian",
    "OracleConfig",
    "PhaseFisherError",
    "PhaseGenerator",
    "ProbeSpec",
    "QFIResult",
    "Scenario",
    "SINGLE_ARM",
    "StateVector",
    "TWO_ARM",
    "TruncationTooSmall",
    "VerificationReport",
    "WITH_REFERENCE",
    "WITHOUT_REFERENCE",
    "alpha_for_mean_photon",
    "annihilation",
    "apply_loss",
    "apply_loss_vector",
    "apply_loss_via_bs",
    "apply_phase",
    "basis_overlap_matrix",
    "build_scenario",
    "coherent_vector",
    "creation",
    "default_truncation",
    "ecs_normalization",
    "ecs_scalars",
    "ecs_vector",
    "eigendecompose_hermitian",
    "mean_photon_number",
    "noon_vector",
    "number_operator",
    "partial_trace",
    "phase_average",
    "qfi_ecs_noref",
    "qfi_ecs_noref_blocksum",
    "qfi_ecs_ref",
    "qfi_ecs_ref_asymptotic",
    "qfi_ecs_ref_reduced",
    "qfi_noon",
    "qfi_noon_continuous",
    "qfi_numeric",
    "qfi_two_level",
    "scenario_mixture",
    "scenario_qfi",
    "sensitivity",
    "sigma_spectrum",
    "single_arm_generator",
    "truncation_for_tolerance",
    "two_arm_generator",
    "two_level_matrix_numeric",
    "verify_all",
]
