"""Exact Fock-state interferometer statistics and nonlocality certificates.

Two or three number-state condensates split across beam-splitter networks
produce parity correlations that no pre-existing-phase account reproduces.
This package computes the exact outcome statistics, checks them against an
independent phase-integral oracle, and certifies the CHSH, three-station
all-or-nothing, and joint-impossibility violations at desk scale.
"""

from .bell import (
    BchshOptimum,
    GhzReport,
    ViolationReport,
    bchsh_q,
    bchsh_q_gaussian,
    correlation_closed_form,
    ghz_contradiction_certificate,
    ghz_correlation_closed_form,
    ghz_correlation_exact,
    ghz_harmonics,
    maximize_bchsh,
    three_station_parity,
    two_station_parity,
)
from .fock import (
    DegenerateConditionError,
    OutcomeDistribution,
    ParityAssignment,
    SourceSpec,
    amplitude,
    amplitude_by_tables,
    distribution,
    enumerate_outcomes,
    parity_expectation,
    sample_outcomes,
)
from .hardy import (
    HardyAmplitudeTable,
    HardyCertificate,
    HardyNetwork,
    build_hardy_network,
    central_bs_parity_distribution,
    certainty_check,
    hardy_amplitudes,
    impossibility_certificate,
)
from .optics import (
    AngleSettings,
    ModeId,
    OpticalElement,
    TransferMatrix,
    beamsplitter_element,
    check_isometry,
    compose_network,
    mirror_element,
    phase_shifter_element,
    three_source_ring,
    two_source_interferometer,
)
from .phase_models import (
    GridTooCoarseError,
    ModelComparison,
    ModelComparisonReport,
    QuadratureGrid,
    classical_phase_probability,
    compare_models,
    correlation_partial,
    maximize_partial_chsh,
    probability_quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "AngleSettings",
    "BchshOptimum",
    "DegenerateConditionError",
    "GhzReport",
    "GridTooCoarseError",
    "HardyAmplitudeTable",
    "HardyCertificate",
    "HardyNetwork",
    "ModeId",
    "ModelComparison",
    "ModelComparisonReport",
    "OpticalElement",
    "OutcomeDistribution",
    "ParityAssignment",
    "QuadratureGrid",
    "SourceSpec",
    "TransferMatrix",
    "ViolationReport",
    "amplitude",
    "amplitude_by_tables",
    "bchsh_q",
    "bchsh_q_gaussian",
    "beamsplitter_element",
    "build_hardy_network",
    "central_bs_parity_distribution",
    "certainty_check",
    "check_isometry",
    "classical_phase_probability",
    "compare_models",
    "compose_network",
    "correlation_closed_form",
    "correlation_partial",
    "distribution",
    "enumerate_outcomes",
    "ghz_contradiction_certificate",
    "ghz_correlation_closed_form",
    "ghz_correlation_exact",
    "ghz_harmonics",
    "hardy_amplitudes",
    "impossibility_certificate",
    "maximize_bchsh",
    "maximize_partial_chsh",
    "mirror_element",
    "parity_expectation",
    "phase_shifter_element",
    "probability_quadrature",
    "sample_outcomes",
    "three_source_ring",
    "three_station_parity",
    "two_source_interferometer",
    "two_station_parity",
]
