"""seqlab: collectively-encoded qutrit pulse sequences, dissipative
dynamics, pairwise interactions, and photon-statistics estimators."""

from .dissipative import (
    DensityMatrix,
    DissipationParams,
    IntegratorConfig,
    MasterTrajectory,
    NumericError,
    evolve_master,
)
from .dsl import ParseError, format_sequence, load_sequence, parse_sequence
from .pairwise import (
    InteractionParams,
    PairState,
    build_pair_hamiltonian,
    mixture_fringe_scan,
    p2_from_g2,
    propagate_pair_sequence,
)
from .photostats import (
    FitResult,
    G2Estimate,
    ShotRecords,
    TimeBinPopulations,
    estimate_g2,
    fit_fringe,
    fit_sinusoid,
    readout_from_sequence,
    readout_populations,
    sample_coherent_shots,
    sample_shots,
)
from .qcore import (
    SEQUENCE_BUDGET_S,
    DriveField,
    DriveSegment,
    PulseSequence,
    QutritState,
    Readout,
    Wait,
    build_hamiltonian,
    propagate_sequence,
    segment_unitary,
    sequence_unitary,
    two_level_propagator,
)
from .ramsey import (
    Backend,
    FringeScan,
    RamseyScanConfig,
    RamseyTerms,
    build_ramsey_sequence,
    extract_visibility,
    fringe_scan,
    rabi_scan,
    ramsey_intensity,
    ramsey_terms,
    ramsey_visibility,
    symmetric_detuning_grid,
)

__version__ = "0.1.0"

__all__ = [
    "Backend",
    "DensityMatrix",
    "DissipationParams",
    "DriveField",
    "DriveSegment",
    "FitResult",
    "FringeScan",
    "G2Estimate",
    "IntegratorConfig",
    "InteractionParams",
    "MasterTrajectory",
    "NumericError",
    "PairState",
    "ParseError",
    "PulseSequence",
    "QutritState",
    "RamseyScanConfig",
    "RamseyTerms",
    "Readout",
    "SEQUENCE_BUDGET_S",
    "ShotRecords",
    "TimeBinPopulations",
    "Wait",
    "build_hamiltonian",
    "build_pair_hamiltonian",
    "build_ramsey_sequence",
    "estimate_g2",
    "evolve_master",
    "extract_visibility",
    "fit_fringe",
    "fit_sinusoid",
    "format_sequence",
    "fringe_scan",
    "load_sequence",
    "mixture_fringe_scan",
    "p2_from_g2",
    "parse_sequence",
    "propagate_pair_sequence",
    "propagate_sequence",
    "rabi_scan",
    "ramsey_intensity",
    "ramsey_terms",
    "ramsey_visibility",
    "readout_from_sequence",
    "readout_populations",
    "sample_coherent_shots",
    "sample_shots",
    "segment_unitary",
    "sequence_unitary",
    "symmetric_detuning_grid",
    "two_level_propagator",
]
