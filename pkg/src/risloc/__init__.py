"""RIS-aided passive-radar localization simulator."""

from .channel import (
    PathGains,
    Scenario,
    SnapshotMatrix,
    apply_ris_reflection,
    delay_signal,
    draw_path_gains,
    steering_vector,
    synthesize_pr_signal,
    synthesize_ris_signal,
)
from .errors import (
    ConfigError,
    DegenerateGeometryError,
    InfeasibleDelayError,
    InvalidParameterError,
    NoSolutionError,
    SceneGenerationError,
    SimulationError,
    UndefinedMetricError,
)
from .estimation import (
    AoaEstimate,
    ToaEstimate,
    average_epochs,
    count_targets,
    default_scan_grid,
    estimate_aoas,
    estimate_toas,
)
from .geometry import (
    SPEED_OF_LIGHT,
    EllipseParams,
    NodeLayout,
    SensingPair,
    distance,
    ellipse_from_delay,
    forward_sensing,
    map_to_position,
)
from .harness import (
    ResultRow,
    ScenePolicy,
    SweepConfig,
    config_from_dict,
    config_to_dict,
    default_config,
    default_layout,
    default_scenario,
    derive_seed,
    load_config,
    random_scene,
    run_sweep,
    write_csv,
)
from .metrics import (
    MetricsReport,
    compute_report,
    detection_probability,
    mse,
    pair_targets,
    srp,
)
from .pipeline import EstimatorParams, TrialOutcome, run_trial
from .ris_control import (
    BeamWeights,
    ReflectionMatrix,
    directed_reflection_matrix,
    initial_reflection_matrix,
    pr_beamformer,
)
from .sequences import (
    CorrelationProfile,
    ZcSequence,
    center_series,
    cross_correlate,
    cyclic_autocorrelation,
    generate_zc,
)

__version__ = "0.1.0"
