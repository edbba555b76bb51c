"""Constants and enums for intentgen."""

from enum import Enum


class Speaker(Enum):
    """Dialogue participants."""
    USER = "user"
    BOT = "bot"


class DialogueSource(Enum):
    """Corpora the ingester understands."""
    MULTIWOZ = "multiwoz"
    SGD = "sgd"
    SYNTHETIC = "synthetic"


class InputFormat(Enum):
    """On-disk formats accepted by ``ingest``."""
    MULTIWOZ = "multiwoz"
    SGD = "sgd"
    CANONICAL = "canonical"


class SplitName(Enum):
    """Corpus splits."""
    UNSUPERVISED = "unsupervised"
    SUPERVISED = "supervised"
    WEAK = "weak"
    DEV = "dev"
    TEST = "test"


class TaskName(Enum):
    """Text-to-text tasks of the multi-task regime."""
    INTENT = "intent"
    GEN3 = "gen3"
    REORDER = "reorder"
    ESCALATION = "escalation"
    REPETITION = "repetition"


class ScenarioKind(Enum):
    """Evaluation scenarios."""
    U1 = "u1"
    U2 = "u2"
    U3 = "u3"
    GEN3 = "gen3"
    GEN5X = "gen5x"
    RND3 = "rnd3"


class RegimeName(Enum):
    """Training regimes."""
    SUC = "SUC"
    SDC = "SDC"
    PART_SDC = "PART_SDC"
    ALL = "ALL"
    ALL_SDC = "ALL_SDC"


class ConflictMode(Enum):
    """Conflict selection modes."""
    THRESHOLD = "threshold"
    MISTAKE_ORACLE = "mistake_oracle"
    CONFLICT_ORACLE = "conflict_oracle"


class ResolutionRule(Enum):
    """How counterfactual predictions are combined."""
    MAX = "max"
    AVERAGE = "average"


# Serialization tokens
TASK_PREFIXES = {
    TaskName.INTENT: "intent:",
    TaskName.GEN3: "gen3:",
    TaskName.REORDER: "reorder:",
    TaskName.ESCALATION: "escalation:",
    TaskName.REPETITION: "repetition:",
}
SPEAKER_TAGS = {
    Speaker.USER: "[user]",
    Speaker.BOT: "[bot]",
}
UTTERANCE_SEPARATOR = " | "
TRUE_TARGET = "true"
FALSE_TARGET = "false"

# Report column labels
SCENARIO_LABELS = {
    ScenarioKind.U1: "1-u",
    ScenarioKind.U2: "2-u",
    ScenarioKind.U3: "3-u",
    ScenarioKind.GEN3: "3-gen",
    ScenarioKind.GEN5X: "3-5xg",
    ScenarioKind.RND3: "3-rnd",
}
REGIME_LABELS = {
    RegimeName.SUC: "SUC",
    RegimeName.SDC: "SDC",
    RegimeName.PART_SDC: "PART-SDC",
    RegimeName.ALL: "ALL",
    RegimeName.ALL_SDC: "ALL-SDC",
}
# Model name of the all-tasks ablation variant
ABLATION_ALL = "all"
TASK_LABELS = {
    TaskName.GEN3: "Utterance generation",
    TaskName.REORDER: "Reordering",
    TaskName.ESCALATION: "Escalation",
    TaskName.REPETITION: "Repetition",
}

# Window extraction
MIN_WINDOW_LENGTH = 3
DEFAULT_MAX_WINDOW_LENGTH = 3

# Hyper-parameter defaults
DEFAULT_MAX_SEQUENCE_LENGTH = 256
DEFAULT_EPOCHS = 50
DEFAULT_PATIENCE = 7
DEFAULT_BATCH_SIZE = 32
DEFAULT_LEARNING_RATE = 3e-4
DEFAULT_ADAM_BETAS = (0.9, 0.997)
DEFAULT_ADAM_EPSILON = 1e-9
DEFAULT_TOP_P = 0.9
DEFAULT_TEMPERATURE = 1.0
GEN5X_SAMPLES = 5

# Task defaults
SWEEP_REORDER_RATIOS = (0.0, 0.1, 0.3, 0.5, 1.0)
DEFAULT_REORDER_RATIO = 0.1
DEFAULT_REPETITION_THRESHOLD = 0.85
DEFAULT_CONFLICT_THRESHOLD = 0.3

# Published dataset shapes (label count, extracted window pool, split sizes U/S/DEV/TEST)
PUBLISHED_SHAPES = {
    "multiwoz": {"intents": 11, "pool": 3994, "sizes": (2538, 1012, 211, 233)},
    "sgd": {"intents": 86, "pool": 34056, "sizes": (23128, 1000, 4933, 4995)},
    "edu": {"intents": 115, "pool": 2063, "sizes": (1200, 400, 200, 263)},
}

# Run directory layout
MANIFEST_FILE = "manifest.json"
EXAMPLES_DIR = "examples"
CHECKPOINTS_DIR = "checkpoints"
PREDICTIONS_DIR = "predictions"
REPORTS_DIR = "reports"
SPLITS_META_FILE = "splits.meta"
