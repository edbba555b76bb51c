#!/usr/bin/env python3
"""Pipeline configuration file.

A YAML document with one section per module plus the root ``seed``. The
file is merged over the defaults and validated; unknown keys are errors.
The application config (``INTENTGEN_SEED``, ``INTENTGEN_DATA_PATH``,
``INTENTGEN_RUN_DIR``) overrides the seed, the corpus path and the run
directory. Without a run directory the run lives under
``INTENTGEN_RUNS_DIR/<corpus name>``.
"""

import copy
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator

from .backends.base import BackendConfig
from .config import Config, get_config
from .constants import (
    DEFAULT_CONFLICT_THRESHOLD,
    DEFAULT_MAX_WINDOW_LENGTH,
    DEFAULT_REORDER_RATIO,
    DEFAULT_REPETITION_THRESHOLD,
    GEN5X_SAMPLES,
    ConflictMode,
    RegimeName,
    ScenarioKind,
    TaskName,
)
from .utils.errors import ConfigurationError
from .utils.io import config_hash
from .utils.logging import get_logger

logger = get_logger(__name__)


def normalize_regime(name: str) -> str:
    """Accept "all-sdc", "ALL_SDC", "All-Sdc" ... and return the enum value."""
    value = name.strip().upper().replace('-', '_')
    try:
        return RegimeName(value).value
    except ValueError:
        raise ValueError(f"unknown regime '{name}'") from None


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CorpusSettings(_Section):
    """Dataset ingestion and splitting."""
    format: Literal["multiwoz", "sgd", "canonical", "synthetic"] = "synthetic"
    path: Optional[str] = None
    name: str = "edu"
    label_field: Literal["intent", "domain"] = "intent"
    sizes: List[int] = Field(default_factory=lambda: [1200, 400, 200, 263])
    max_window_length: Optional[int] = Field(default=DEFAULT_MAX_WINDOW_LENGTH, ge=3)
    synthetic_intents: int = Field(default=115, gt=0)
    synthetic_windows: int = Field(default=2063, gt=0)

    @field_validator('sizes')
    @classmethod
    def _four_sizes(cls, value: List[int]) -> List[int]:
        if len(value) != 4 or any(v < 0 for v in value):
            raise ValueError("sizes must be four non-negative counts (U, S, DEV, TEST)")
        return value


class TasksSettings(_Section):
    """Task construction and the unsupervised mixture."""
    tasks: List[Literal["intent", "gen3", "reorder", "escalation", "repetition"]] = Field(
        default_factory=lambda: ["intent", "gen3", "reorder"]
    )
    intent_k: Literal[1, 2, 3] = 3
    reorder_ratio: float = Field(default=DEFAULT_REORDER_RATIO, ge=0.0, le=1.0)
    unsupervised_budget: Optional[int] = Field(default=None, ge=0)
    repetition_threshold: float = Field(default=DEFAULT_REPETITION_THRESHOLD, ge=0.0, le=1.0)

    @property
    def task_names(self) -> List[TaskName]:
        return [TaskName(t) for t in self.tasks]


class WeakSettings(_Section):
    """Agreement-based weak labeling."""
    enabled: bool = True
    backend_a: str = "sgd:seed=13"
    backend_b: str = "sgd:seed=29"
    utterances: Literal[1, 2, 3] = 1


class TrainingSettings(_Section):
    """Regimes trained by the pipeline."""
    regimes: List[str] = Field(default_factory=lambda: ["SUC", "SDC", "ALL_SDC"])
    weak_in_second_stage: bool = True

    @field_validator('regimes')
    @classmethod
    def _known_regimes(cls, value: List[str]) -> List[str]:
        normalized = [normalize_regime(v) for v in value]
        if not normalized:
            raise ValueError("at least one regime is required")
        if len(set(normalized)) != len(normalized):
            raise ValueError("regimes must be unique")
        return normalized


class InferenceSettings(_Section):
    """Evaluation scenarios."""
    scenarios: List[Literal["u1", "u2", "u3", "gen3", "gen5x", "rnd3"]] = Field(
        default_factory=lambda: [k.value for k in ScenarioKind]
    )
    split: Literal["test", "dev"] = "test"
    gen5x_samples: int = Field(default=GEN5X_SAMPLES, gt=0)
    generators: List[str] = Field(default_factory=list)
    rnd3_source: Literal["generator", "corpus"] = "generator"
    baseline_model: str = "SUC"
    baseline_scenario: Literal["u1", "u2", "u3", "gen3", "gen5x", "rnd3"] = "u1"
    baseline_run: Optional[str] = None

    @field_validator('generators')
    @classmethod
    def _known_generators(cls, value: List[str]) -> List[str]:
        return [normalize_regime(v) for v in value]

    @field_validator('baseline_model')
    @classmethod
    def _known_baseline(cls, value: str) -> str:
        return normalize_regime(value)


class ConflictSettings(_Section):
    """Counterfactual conflict resolution."""
    enabled: bool = True
    modes: List[Literal["threshold", "mistake_oracle", "conflict_oracle"]] = Field(
        default_factory=lambda: [m.value for m in ConflictMode]
    )
    threshold: float = Field(default=DEFAULT_CONFLICT_THRESHOLD, gt=0.0, lt=1.0)
    rule: Literal["max", "average"] = "max"
    model: Optional[str] = None

    @field_validator('modes', mode='before')
    @classmethod
    def _dash_modes(cls, value: Any) -> Any:
        if isinstance(value, list):
            return [v.replace('-', '_') if isinstance(v, str) else v for v in value]
        return value

    @field_validator('model')
    @classmethod
    def _known_model(cls, value: Optional[str]) -> Optional[str]:
        return normalize_regime(value) if value else value


class HarnessSettings(_Section):
    """Run directory and reports."""
    run_dir: Optional[str] = None
    sweep_ratios: List[float] = Field(default_factory=list)
    # Auxiliary tasks for the task-importance run; empty disables the stage
    ablation_tasks: List[Literal["gen3", "reorder", "escalation", "repetition"]] = Field(default_factory=list)
    ablation_regime: str = "ALL"

    @field_validator('sweep_ratios')
    @classmethod
    def _ratios_in_range(cls, value: List[float]) -> List[float]:
        if any(not 0.0 <= r <= 1.0 for r in value):
            raise ValueError("sweep ratios must lie in [0, 1]")
        return value

    @field_validator('ablation_tasks')
    @classmethod
    def _distinct_tasks(cls, value: List[str]) -> List[str]:
        if len(set(value)) != len(value):
            raise ValueError("ablation tasks must be unique")
        return value

    @field_validator('ablation_regime')
    @classmethod
    def _known_regime(cls, value: str) -> str:
        return normalize_regime(value)


class PipelineSettings(_Section):
    """The whole pipeline configuration."""
    seed: int = 13
    corpus: CorpusSettings = Field(default_factory=CorpusSettings)
    tasks: TasksSettings = Field(default_factory=TasksSettings)
    weak: WeakSettings = Field(default_factory=WeakSettings)
    backend: BackendConfig = Field(default_factory=BackendConfig)
    training: TrainingSettings = Field(default_factory=TrainingSettings)
    inference: InferenceSettings = Field(default_factory=InferenceSettings)
    conflicts: ConflictSettings = Field(default_factory=ConflictSettings)
    harness: HarnessSettings = Field(default_factory=HarnessSettings)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode='json')

    @property
    def hash(self) -> str:
        return config_hash(self.to_dict())


DEFAULT_SETTINGS: Dict[str, Any] = PipelineSettings().to_dict()

# Config attribute -> settings key
CONFIG_OVERRIDES = {
    'seed': ('seed',),
    'data_path': ('corpus', 'path'),
    'run_dir': ('harness', 'run_dir'),
}


def _merge_config(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Deep merge override config into a copy of base config."""
    result = copy.deepcopy(base)
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _merge_config(result[key], value)
        else:
            result[key] = copy.deepcopy(value)
    return result


def _environment() -> Config:
    try:
        return get_config()
    except ValueError as e:
        raise ConfigurationError(f"invalid environment: {e}") from e


def _apply_env_overrides(data: Dict[str, Any], config: Config) -> Dict[str, Any]:
    for attribute, keys in CONFIG_OVERRIDES.items():
        value = getattr(config, attribute)
        if value is None:
            continue
        target = data
        for key in keys[:-1]:
            target = target.setdefault(key, {})
        target[keys[-1]] = value
        logger.info(f"environment overrides {'.'.join(keys)}")
    return data


def _default_run_dir(data: Dict[str, Any], config: Config) -> Dict[str, Any]:
    harness = data.setdefault('harness', {})
    if isinstance(harness, dict) and harness.get('run_dir') is None:
        corpus = data.get('corpus')
        name = corpus.get('name') if isinstance(corpus, dict) else None
        harness['run_dir'] = str(Path(config.runs_dir) / str(name or DEFAULT_SETTINGS['corpus']['name']))
    return data


def settings_from_dict(data: Optional[Dict[str, Any]] = None, env: bool = True) -> PipelineSettings:
    """
    Validate a configuration mapping merged over the defaults.

    Raises:
        ConfigurationError: on unknown keys or invalid values
    """
    merged = _merge_config(DEFAULT_SETTINGS, data or {})
    config = _environment() if env else Config()
    if env:
        merged = _apply_env_overrides(merged, config)
    merged = _default_run_dir(merged, config)
    try:
        return PipelineSettings.model_validate(merged)
    except PydanticValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e


def load_settings(path: Optional[Union[str, Path]] = None, env: bool = True) -> PipelineSettings:
    """
    Load and validate a YAML configuration file.

    Args:
        path: Configuration file; None gives the defaults
        env: Apply environment overrides

    Returns:
        Validated PipelineSettings
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"configuration file {path} not found")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"{path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: top level must be a mapping")
    return settings_from_dict(data, env=env)


def save_settings(settings: PipelineSettings, path: Union[str, Path]) -> Path:
    """Write settings as YAML."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(settings.to_dict(), f, default_flow_style=False, sort_keys=False)
    return path


def _drop_none(data: Dict[str, Any]) -> Dict[str, Any]:
    result = {}
    for key, value in data.items():
        if isinstance(value, dict):
            value = _drop_none(value)
            if not value:
                continue
        if value is not None:
            result[key] = value
    return result


def override_settings(settings: PipelineSettings, overrides: Dict[str, Any]) -> PipelineSettings:
    """
    Apply command-line overrides; None values leave the setting unchanged.

    Raises:
        ConfigurationError: if an override is invalid
    """
    cleaned = _drop_none(overrides)
    if not cleaned:
        return settings
    return settings_from_dict(_merge_config(settings.to_dict(), cleaned), env=False)
