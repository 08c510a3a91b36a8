"""Folding-receiver acquisition simulation and compressive spectrum recovery."""

from .nyfr import GridSpec, LoPattern, lo_phase, measure_analytic, zone_index
from .recovery import RecoveryConfig, RecoveryMode, RecoveryResult, bomp, omp, reconstruct_time
from .scene import (
    ArrayGeometry,
    ComplexSignal,
    EmitterKind,
    EmitterSpec,
    RisWeights,
    Scenario,
    add_awgn,
    delay_combine,
    ris_combine,
    steering_phase,
    synth_emitter,
)
from .sensing import (
    BlockPartition,
    SensingOperator,
    SpectrumVector,
    apply_adjoint,
    apply_forward,
    assemble_multi,
    assemble_single,
    build_modulation,
    spectrum_from_nyquist,
)
from .coherence import (
    BlockCoherenceReport,
    GramReport,
    block_coherence,
    gram_dense,
    gram_report,
    multichannel_gram_compare,
    rip_certificate,
    t_block_closed_form,
)
from .evaluation import ExperimentSpec, TrialResult, pcc, run_experiment, run_trial

__version__ = "0.1.0"
