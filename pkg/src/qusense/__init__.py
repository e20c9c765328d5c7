"""Mixed-radix QFT simulation and QFT-based quantum-sensing protocols."""

from .core import (
    ATOL,
    DENSE_CAP,
    CapacityError,
    DimensionVector,
    InvariantError,
    MixedState,
    PureState,
    RegisterIndex,
    apply_gate,
    digits_to_index,
    index_to_digits,
    measure_distribution,
    partial_trace,
    purity,
    sample_outcomes,
)
from .gates import (
    Circuit,
    GateOp,
    apply_circuit,
    chrestenson,
    circuit_from_json,
    circuit_to_json,
    circuit_unitary,
    controlled_phase,
    dft_matrix,
    digit_reversal_permutation,
    hadamard,
    phase_rotation,
    synthesize_inverse_qft,
    synthesize_qft,
)
from .metrology import (
    PLANCK_SI,
    FisherResult,
    SensingParams,
    cfi,
    dynamic_range,
    fisher_scan,
    qcrb_precision,
    qfi_analytic,
    qfi_pure,
    strategy_state,
)
from .noise import DephasingSpec, dephase, purity_study
from .sensing import (
    CorrelationResult,
    CorrelationRun,
    TargetSpinConfig,
    ml_phase_estimates,
    prepare_phase_state,
    readout_local_hadamard,
    readout_qft,
    simulate_ac_field_estimation,
    simulate_correlation_spectroscopy,
    single_memory_protocol,
    two_memory_qpea_example,
)

__version__ = "0.1.0"
