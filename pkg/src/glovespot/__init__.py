"""Real-time continuous hand-gesture spotting on a 22-sensor glove stream.

A from-scratch sigmoid MLP trained by online backprop with momentum, a
two-network cascade that vetoes known transition shapes, a deterministic
synthetic glove-stream generator, a debounced streaming spotter mapped onto
simulated robot end-effector commands, and an experiment harness that scores
recognition the way a continuous stream demands.
"""

from .domain import (
    COMMAND_LIBRARY_SIZE,
    FEATURE_SIZE,
    FRAME_PERIOD_S,
    N_SENSORS,
    CalibrationProfile,
    FrameHistory,
    GestureLabel,
    RobotCommand,
    SensorFrame,
    extract_feature,
    map_command,
    normalize,
    one_hot,
)
from .errors import (
    DimensionError,
    ExperimentError,
    GenerationError,
    GlovespotError,
    HarvestError,
    InvalidTopologyError,
    MissingFrameError,
    ModelFormatError,
    NoSavedPoseError,
    StreamOrderError,
)
from .estimator import GestureNetClassifier, LagPairFeatures
from .harness import (
    PRESET_NAMES,
    EvalReport,
    ExperimentConfig,
    ScoreCard,
    TrainedSystem,
    build_training_set,
    emit_report,
    evaluate,
    preset_config,
    run_experiment,
    score,
    train_cascade,
    write_report,
)
from .model_io import load_cascade, load_model, save_cascade, save_model
from .network import (
    ForwardTrace,
    MomentumState,
    Network,
    TrainConfig,
    apply_update,
    backprop_deltas,
    forward,
    grad_check,
    init_network,
    loss,
    sigmoid,
    sigmoid_deriv,
    train,
)
from .robot import RobotState, SimConfig, apply_command, tick, wrap_angle
from .session import SessionDriver
from .service import create_app
from .spotter import (
    CascadeModel,
    GestureSpotter,
    SpotResult,
    SpotterState,
    classify,
    latency_probe,
    spot,
    step,
)
from .streams import TruthTag, read_stream, write_stream
from .synth import (
    AnnotatedStream,
    GestureTemplate,
    ScenarioScript,
    ScriptStep,
    generate_stream,
    harvest_non_gestures,
    load_script,
    load_templates,
    make_confusable_triplet,
    make_templates,
    save_script,
    save_templates,
)

__version__ = "0.1.0"
