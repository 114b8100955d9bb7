"""Seedable BB84 simulator with man-in-the-middle attacks and defense policies."""
from .adversary import (
    AttackReport,
    EveRecord,
    EveStrategy,
    ReconstructionError,
    StrategyKind,
    attack1_forge,
    attack1_reconstruct,
    attack2_forge,
    classify_copies,
    intercept_fixed_basis,
)
from .campaign import (
    StatsReport,
    detection_curve,
    estimate_misidentification,
    run_campaign,
    run_trials,
)
from .channels import (
    ChannelEvent,
    ConfigurationError,
    MessageOrdering,
    NoCloningError,
    OrderingKind,
    PolicyConfig,
    PolicyVerdict,
    SessionConfig,
    SessionTranscript,
    enforce_basis_ordering,
    enforce_single_send,
    replay,
    run_session,
    with_seed,
)
from .estimators import UndefinedQBER, qber
from .kernels import BACKEND
from .protocol import (
    Mode,
    ProtocolCorruption,
    ProtocolError,
    QuantumSignal,
    compare_controls,
    encode,
    generate_controls,
    generate_payload,
    measure_signal,
    sift,
)
from .quantum import (
    SCRAMBLED,
    Basis,
    NormalizationError,
    Outcome,
    PureState,
    SymbolicQubit,
    apply_h,
    apply_x,
    measure_physical,
    measure_symbolic,
    prepare,
    to_vector,
)
from .rng import SeededRng

__version__ = "0.1.0"
