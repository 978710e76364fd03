"""qkdlab: simulator and security analysis for relay-based QKD under frame rotation."""

from .config import ExperimentConfig, SweepSpec, load_config, parse_config
from .errors import (
    ConfigurationError,
    DomainError,
    EstimationError,
    InconsistentStatisticsError,
)
from .output import CSV_COLUMNS, emit_csv, emit_svg, read_csv
from .qcore import (
    Basis,
    BellOutcome,
    ChannelParams,
    NoiseParams,
    OutcomeProbs,
    PureQubit,
    StatePrepSpec,
    TwoQubitDensity,
    apply_depolarizing,
    apply_frame_rotation,
    bsm_outcome_probs,
    make_state,
)
from .secanalysis import (
    CParameterEstimate,
    Expectation,
    KeyRateBreakdown,
    QberRecord,
    SecurityEstimate,
    analyze,
    binary_entropy,
    c_parameter,
    expectation_full,
    expectation_single_row,
    key_rate_mdi,
    key_rate_rfi,
    qber,
)
from .simkit import (
    CountTable,
    MenuMode,
    Party,
    Setting,
    SettingOutcome,
    SimMode,
    StateMenu,
    build_setting_grid,
    run_protocol,
    setting_distribution,
    setting_stream,
    simulate_setting,
)
from .sweep import SweepRow, evaluate_point, run_sweep

__version__ = "0.1.0"
