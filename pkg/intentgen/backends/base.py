#!/usr/bin/env python3
"""Text-to-text backend interface."""

import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..constants import (
    DEFAULT_ADAM_BETAS,
    DEFAULT_ADAM_EPSILON,
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_SEQUENCE_LENGTH,
    DEFAULT_PATIENCE,
    DEFAULT_TEMPERATURE,
    DEFAULT_TOP_P,
)
from ..models.prediction import GenerationResult, LabelScore, Prediction
from ..models.run import EpochRecord, TrainingLog
from ..models.task import LabelSpace, TaskExample
from ..utils.errors import BackendStateError, TrainingError, UsageError
from ..utils.io import fingerprint
from ..utils.logging import get_logger

logger = get_logger(__name__)


class BackendConfig(BaseModel):
    """Model, optimisation and decoding settings."""
    model_config = ConfigDict(extra="forbid")

    kind: str = Field(default="oracle", pattern="^(oracle|tiny|full)$")
    model_name: Optional[str] = None
    script: Optional[str] = None
    max_sequence_length: int = Field(default=DEFAULT_MAX_SEQUENCE_LENGTH, gt=0)
    epochs: int = Field(default=DEFAULT_EPOCHS, gt=0)
    early_stopping_patience: int = Field(default=DEFAULT_PATIENCE, gt=0)
    batch_size: int = Field(default=DEFAULT_BATCH_SIZE, gt=0)
    learning_rate: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    adam_betas: Tuple[float, float] = DEFAULT_ADAM_BETAS
    adam_epsilon: float = Field(default=DEFAULT_ADAM_EPSILON, gt=0)
    seed: int = 13
    temperature: float = Field(default=DEFAULT_TEMPERATURE, gt=0)
    top_k: Optional[int] = Field(default=None, gt=0)
    top_p: float = Field(default=DEFAULT_TOP_P, gt=0, le=1)
    num_samples: int = Field(default=1, gt=0)
    max_new_tokens: int = Field(default=48, gt=0)
    free_decoding: bool = False
    device: Optional[str] = None

    @field_validator('adam_betas')
    @classmethod
    def _betas_in_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        if not all(0.0 <= b < 1.0 for b in value):
            raise ValueError("adam betas must lie in [0, 1)")
        return value


class EarlyStopping:
    """Patience counter over a monitored value."""

    def __init__(self, patience: int, mode: str = "min"):
        if mode not in ("min", "max"):
            raise UsageError(f"unknown early-stopping mode '{mode}'")
        self.patience = patience
        self.mode = mode
        self.best_value: Optional[float] = None
        self.best_epoch: Optional[int] = None
        self.bad_epochs = 0

    def _improved(self, value: float) -> bool:
        if self.best_value is None:
            return True
        return value < self.best_value if self.mode == "min" else value > self.best_value

    def step(self, epoch: int, value: float) -> bool:
        """
        Record one epoch.

        Returns:
            True when ``patience`` consecutive epochs failed to improve
        """
        if self._improved(value):
            self.best_value = value
            self.best_epoch = epoch
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        return self.bad_epochs >= self.patience


EpochFn = Callable[[int], float]
EvalFn = Callable[[int], Tuple[Optional[float], Optional[float]]]


def run_epochs(train_epoch: EpochFn, evaluate: Optional[EvalFn], epochs: int, patience: int,
               on_improve: Optional[Callable[[int], None]] = None) -> TrainingLog:
    """
    Generic epoch loop with early stopping.

    Model selection monitors dev accuracy when ``evaluate`` reports one and
    dev loss otherwise; without ``evaluate`` the training loss is monitored.

    Args:
        train_epoch: Runs one epoch, returns the mean training loss
        evaluate: Returns (dev_loss, dev_accuracy) for an epoch
        epochs: Maximum number of epochs
        patience: Non-improving epochs tolerated
        on_improve: Called with the epoch number whenever the monitored value improves

    Returns:
        TrainingLog with one record per epoch run

    Raises:
        TrainingError: on a non-finite loss
    """
    log = TrainingLog()
    stopper: Optional[EarlyStopping] = None
    for epoch in range(1, epochs + 1):
        train_loss = float(train_epoch(epoch))
        if not math.isfinite(train_loss):
            raise TrainingError(f"non-finite training loss {train_loss}", epoch=epoch)
        dev_loss, dev_accuracy = evaluate(epoch) if evaluate is not None else (None, None)
        if dev_loss is not None and not math.isfinite(dev_loss):
            raise TrainingError(f"non-finite dev loss {dev_loss}", epoch=epoch)
        log.epochs.append(EpochRecord(epoch, train_loss, dev_loss, dev_accuracy))

        if dev_accuracy is not None:
            monitored, mode = dev_accuracy, "max"
        elif dev_loss is not None:
            monitored, mode = dev_loss, "min"
        else:
            monitored, mode = train_loss, "min"
        if stopper is None:
            stopper = EarlyStopping(patience, mode)
        should_stop = stopper.step(epoch, monitored)
        if stopper.best_epoch == epoch and on_improve is not None:
            on_improve(epoch)
        logger.info(f"epoch {epoch}: train_loss={train_loss:.4f} dev_loss={dev_loss} dev_acc={dev_accuracy}")
        if should_stop:
            log.stopped_early = True
            logger.info(f"Early stopping at epoch {epoch} (best epoch {stopper.best_epoch})")
            break
    log.best_epoch = stopper.best_epoch if stopper else None
    return log


def normalize_log_likelihoods(values: Sequence[float]) -> List[float]:
    """Exponentiate and normalize log-likelihoods so they sum to one."""
    array = np.asarray(values, dtype=float)
    array = np.exp(array - array.max())
    return (array / array.sum()).tolist()


class Seq2SeqBackend(ABC):
    """
    A text-to-text model.

    Subclasses implement training, generation and label log-likelihoods;
    this class owns the shared contract (state checks, normalization,
    tie-breaking and the free-decoding fallback).
    """

    name = "base"
    # Backends that must not be called concurrently set this
    serialized = False

    def __init__(self, config: Optional[BackendConfig] = None):
        self.config = config or BackendConfig()
        self.history: List[dict] = []
        self._trained = False

    @property
    def ready(self) -> bool:
        return self._trained

    def _require_ready(self, operation: str) -> None:
        if not self.ready:
            raise BackendStateError(f"{self.name} backend must be trained or loaded before {operation}")

    def fine_tune(self, examples: Sequence[TaskExample], config: Optional[BackendConfig] = None,
                  dev_examples: Optional[Sequence[TaskExample]] = None) -> TrainingLog:
        """
        Fine-tune on a (possibly mixed-task) example list.

        Args:
            examples: Training examples
            config: Overrides the backend's config for this call
            dev_examples: Model-selection examples

        Returns:
            Per-epoch training log

        Raises:
            UsageError: if ``examples`` is empty
            TrainingError: if the loss becomes non-finite
        """
        if not examples:
            raise UsageError("cannot fine-tune on an empty example set")
        config = config or self.config
        log = self._fine_tune(list(examples), config, list(dev_examples or []))
        self._trained = True
        self.history.append({
            'examples': len(examples),
            'fingerprint': fingerprint(e.key for e in examples),
            'epochs': len(log),
            'stopped_early': log.stopped_early,
        })
        return log

    def generate(self, prompt: str, n: int = 1, config: Optional[BackendConfig] = None,
                 seed: Optional[int] = None) -> GenerationResult:
        """
        Generate ``n`` continuations: greedy when n == 1, nucleus sampling otherwise.

        Raises:
            BackendStateError: if the backend is neither trained nor scripted
        """
        if n < 1:
            raise UsageError(f"n must be positive, got {n}")
        self._require_ready("generate")
        config = config or self.config
        result = self._generate(prompt, n, config, config.seed if seed is None else seed)
        if len(result.texts) != n or not all(math.isfinite(s) for s in result.scores):
            raise BackendStateError(f"{self.name} returned a malformed generation result")
        return result

    def score_labels(self, prompt: str, labels: LabelSpace) -> List[LabelScore]:
        """
        Normalized label scores, descending; ties keep label-space order.

        Args:
            prompt: Serialized input
            labels: Candidate labels

        Returns:
            One LabelScore per label, scores summing to one
        """
        if len(labels) == 0:
            raise UsageError("label space is empty")
        self._require_ready("score_labels")
        log_likelihoods = self._label_log_likelihoods(prompt, labels)
        scores = normalize_log_likelihoods(log_likelihoods)
        ranked = sorted(zip(labels.labels, scores, range(len(labels))), key=lambda x: (-x[1], x[2]))
        return [LabelScore(label, score) for label, score, _ in ranked]

    def classify(self, prompt: str, labels: LabelSpace) -> Prediction:
        """
        Predict one label.

        With free decoding enabled, the greedy output is used when it decodes
        to a label; otherwise the score argmax is returned.
        """
        scores = self.score_labels(prompt, labels)
        by_label = {s.label: s.score for s in scores}
        raw_text = None
        label, score = scores[0].label, scores[0].score
        if self.config.free_decoding:
            raw_text = self.generate(prompt, 1).texts[0]
            decoded = labels.decode(raw_text)
            if decoded is not None:
                label, score = decoded, by_label[decoded]
        return Prediction(label=label, score=score, raw_text=raw_text, scores=scores)

    @abstractmethod
    def _fine_tune(self, examples: List[TaskExample], config: BackendConfig,
                   dev_examples: List[TaskExample]) -> TrainingLog:
        """Train and return the log."""

    @abstractmethod
    def _generate(self, prompt: str, n: int, config: BackendConfig, seed: int) -> GenerationResult:
        """Produce exactly ``n`` texts."""

    @abstractmethod
    def _label_log_likelihoods(self, prompt: str, labels: LabelSpace) -> List[float]:
        """Length-normalized log-likelihood of each verbalized label, in label-space order."""

    @abstractmethod
    def save(self, path: Union[str, Path]) -> Path:
        """Write a checkpoint directory."""

    @abstractmethod
    def load(self, path: Union[str, Path]) -> 'Seq2SeqBackend':
        """Restore from a checkpoint directory."""
