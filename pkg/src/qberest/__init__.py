"""Syndrome-based QBER estimation for LDPC reconciliation, plus a BSC
simulation harness comparing the previous-block, syndrome-likelihood, and
mixed estimators."""

from .estimator import (
    EffectiveDegreeProfile,
    EstimateResult,
    QberWindowPrior,
    effective_degrees,
    estimate_mixed,
    estimate_qber_syndrome,
    log_likelihood,
    p_ml,
    q_ml_regular,
    window_log_prior,
    xor_prob,
)
from .exceptions import (
    AlistParseError,
    ConstructionError,
    EstimationError,
    QberestError,
    TraceExhausted,
)
from .extension import (
    CodeSelection,
    ExtensionLayout,
    binary_entropy,
    efficiency,
    extend_key,
    plan_extension,
    select_code,
)
from .ldpc import (
    CodePool,
    ParityCheckMatrix,
    PoolEntry,
    load_pool,
    relative_syndrome,
    save_pool,
    syndrome,
)
from .alist import load_alist, save_alist
from .config import SimulationConfig, load_config, parse_config_text
from .evaluation import (
    ApproachStats,
    BlockRecord,
    EvaluationReport,
    compute_report,
    error_histogram,
    read_blocks_csv,
    run_evaluation,
    write_outputs,
)
from .peg import construct_peg, measure_girth, round_degree_counts
from .rng import SHUFFLE_ID, derive_seed, fisher_yates_permutation, splitmix64
from .simulate import (
    KeyPair,
    QberTraceModel,
    constant_trace,
    generate_key_pair,
    next_trace_qber,
    random_walk_trace,
    replay_trace_from_csv,
    trace_values,
)

__version__ = "0.1.0"
