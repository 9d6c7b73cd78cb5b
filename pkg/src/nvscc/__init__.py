"""Desk-scale toolkit for single-shot spin-to-charge readout of NV centers.

The package models the physics and statistics of an all-optical NV spin
readout built on cryogenic spin-to-charge conversion:

- ground-state electron-nuclear spin Hamiltonian and field inference
- low-temperature excited-state structure and optical transition strengths
- five-state classical rate dynamics under laser/microwave pulse timelines
- photon-count histogram models, threshold classification, fidelity metrics
- end-to-end protocol error propagation, SNR and speed-up accounting

All physical quantities are SI unless a name says otherwise (``*_ghz``,
``*_mt``, ``*_cps``, ...).
"""

from nvscc.counts import (
    ChargeDiscriminator,
    CountHistogram,
    GaussianMixtureModel,
    PoissonModel,
    charge_fidelity,
    fit_count_model,
    optimize_threshold,
    sample_histogram,
)
from nvscc.errors import (
    ConfigError,
    DataFormatError,
    FitNonConvergenceError,
    UnderdeterminedError,
)
from nvscc.excited_state import (
    ExcitedStateParams,
    StrainField,
    build_excited_hamiltonian,
    diagonalize,
    synth_ple_spectrum,
    transition_table,
)
from nvscc.ground_spin import (
    FieldVector,
    GroundSpinParams,
    OdmrLineSet,
    infer_field,
    odmr_transitions,
)
from nvscc.protocol import (
    ProtocolErrorBudget,
    SensingTimingModel,
    conventional_snr,
    end_to_end_mc,
    fidelity_and_snr,
    fidelity_report,
    forward_error_model,
    invert_error_model,
    speedup_curve,
)
from nvscc.ratefit import TraceRecord, global_fit, synth_bundle
from nvscc.rates import (
    FluorescenceParams,
    OpticalPumpParams,
    PopulationState,
    PulseTimeline,
    simulate_timeline,
)

__all__ = [
    "ChargeDiscriminator",
    "ConfigError",
    "CountHistogram",
    "DataFormatError",
    "ExcitedStateParams",
    "FieldVector",
    "FitNonConvergenceError",
    "FluorescenceParams",
    "GaussianMixtureModel",
    "GroundSpinParams",
    "OdmrLineSet",
    "OpticalPumpParams",
    "PoissonModel",
    "PopulationState",
    "ProtocolErrorBudget",
    "PulseTimeline",
    "SensingTimingModel",
    "StrainField",
    "TraceRecord",
    "UnderdeterminedError",
    "build_excited_hamiltonian",
    "charge_fidelity",
    "conventional_snr",
    "diagonalize",
    "end_to_end_mc",
    "fidelity_and_snr",
    "fidelity_report",
    "fit_count_model",
    "forward_error_model",
    "global_fit",
    "infer_field",
    "invert_error_model",
    "odmr_transitions",
    "optimize_threshold",
    "sample_histogram",
    "simulate_timeline",
    "speedup_curve",
    "synth_bundle",
    "synth_ple_spectrum",
    "transition_table",
]

__version__ = "0.1.0"
