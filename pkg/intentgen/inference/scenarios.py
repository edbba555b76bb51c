#!/usr/bin/env python3
"""Truncated-context and look-ahead evaluation scenarios."""

import math
import random
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..backends.base import Seq2SeqBackend
from ..constants import GEN5X_SAMPLES, ScenarioKind
from ..models.dialogue import IntentWindow
from ..models.prediction import Prediction
from ..models.run import ScenarioResult
from ..models.task import LabelSpace
from ..tasks.formatting import gen3_prompt, intent_prompt, user_turn
from ..utils.errors import ConfigurationError, UsageError
from ..utils.logging import get_logger
from ..utils.seeding import stable_hash

logger = get_logger(__name__)

CONTEXT_LENGTHS = {ScenarioKind.U1: 1, ScenarioKind.U2: 2, ScenarioKind.U3: 3}
GENERATIVE = (ScenarioKind.GEN3, ScenarioKind.GEN5X)


@dataclass
class ScenarioSpec:
    """One evaluation scenario."""

    kind: ScenarioKind
    num_samples: Optional[int] = None
    generator: Optional[Seq2SeqBackend] = None
    seed: int = 0
    generator_name: Optional[str] = None
    # Uniform-from-corpus source for rnd3 instead of context-free generation
    rnd3_pool: Optional[List[str]] = None

    def __post_init__(self):
        if self.num_samples is None:
            self.num_samples = GEN5X_SAMPLES if self.kind is ScenarioKind.GEN5X else 1
        if self.num_samples < 1:
            raise UsageError(f"{self.kind.value}: num_samples must be at least 1")

    @property
    def needs_generator(self) -> bool:
        return self.kind in GENERATIVE or (self.kind is ScenarioKind.RND3 and not self.rnd3_pool)


def window_seed(seed: int, window: IntentWindow) -> int:
    """Per-window sampling seed, independent of evaluation order."""
    return stable_hash(f"{seed}:{window.window_id}") % (2 ** 31)


def majority_vote(votes: Sequence[Tuple[str, float]], labels: Optional[LabelSpace] = None) -> str:
    """
    Plurality vote over (label, score) pairs.

    Ties on count go to the larger summed score, then to the lowest label
    index (label-space order when given, else first appearance).

    Raises:
        UsageError: on an empty vote list
    """
    if not votes:
        raise UsageError("majority_vote needs at least one vote")
    counts: Dict[str, int] = defaultdict(int)
    scores: Dict[str, List[float]] = defaultdict(list)
    first_seen: Dict[str, int] = {}
    for position, (label, score) in enumerate(votes):
        counts[label] += 1
        scores[label].append(score)
        first_seen.setdefault(label, position)

    def index(label: str) -> int:
        if labels is not None and label in labels:
            return labels.index(label)
        return len(labels or []) + first_seen[label]

    return min(counts, key=lambda label: (-counts[label], -math.fsum(scores[label]), index(label)))


def _generated_third(window: IntentWindow, text: str) -> List:
    return list(window.head(2)) + [user_turn(text, window.utterances[2].index)]


def predict_scenario(window: IntentWindow, spec: ScenarioSpec, classifier: Seq2SeqBackend,
                     labels: LabelSpace) -> Prediction:
    """
    Predict the intent of one window under one scenario.

    u1/u2/u3 classify the first 1/2/3 logged utterances. gen3 and gen5x
    replace the third utterance with generated ones (conditioned on the
    first user utterance and the logged bot response), classify each and
    take a majority vote. rnd3 appends a context-free utterance.

    Raises:
        ConfigurationError: if a generative scenario has no generator
    """
    if spec.kind in CONTEXT_LENGTHS:
        return classifier.classify(intent_prompt(window.head(CONTEXT_LENGTHS[spec.kind])), labels)

    if spec.needs_generator and spec.generator is None:
        raise ConfigurationError(f"scenario {spec.kind.value} needs a generator")

    seed = window_seed(spec.seed, window)
    if spec.kind is ScenarioKind.RND3:
        if spec.rnd3_pool:
            thirds = [random.Random(seed).choice(spec.rnd3_pool)]
        else:
            thirds = spec.generator.generate(gen3_prompt([]), 1, seed=seed).texts
    else:
        thirds = spec.generator.generate(gen3_prompt(window.head(2)), spec.num_samples, seed=seed).texts

    predictions = [
        classifier.classify(intent_prompt(_generated_third(window, text)), labels)
        for text in thirds
    ]
    votes = [(p.label, p.score) for p in predictions]
    label = majority_vote(votes, labels)
    winner = next(p for p in predictions if p.label == label)
    return Prediction(
        label=label,
        score=winner.score,
        votes=[p.label for p in predictions],
        vote_scores=[p.score for p in predictions],
        generated_thirds=list(thirds),
        scores=winner.scores,
    )


@dataclass
class Evaluation:
    """Scenario results plus per-window audit records."""

    results: List[ScenarioResult] = field(default_factory=list)
    predictions: List[Dict[str, Any]] = field(default_factory=list)

    def result(self, scenario: str) -> Optional[ScenarioResult]:
        return next((r for r in self.results if r.scenario == scenario), None)


def evaluate(windows: Sequence[IntentWindow], specs: Sequence[ScenarioSpec],
             classifier: Seq2SeqBackend, labels: LabelSpace, model: str = "model",
             max_workers: int = 1) -> Evaluation:
    """
    Accuracy t/d of a classifier under each scenario.

    Args:
        windows: Gold-labeled evaluation windows
        specs: Scenarios to run
        classifier: Trained classifier backend
        labels: Label space
        model: Model name recorded in the results
        max_workers: Threads per scenario; ignored for serialized backends

    Returns:
        Evaluation with one ScenarioResult per spec

    Raises:
        UsageError: on an empty split or an unlabeled window
    """
    windows = list(windows)
    if not windows:
        raise UsageError("cannot evaluate on an empty split")
    if any(w.intent is None for w in windows):
        raise UsageError("every evaluation window needs a gold intent")

    evaluation = Evaluation()
    for spec in specs:
        serialized = classifier.serialized or (spec.generator is not None and spec.generator.serialized)

        def run(window: IntentWindow) -> Prediction:
            return predict_scenario(window, spec, classifier, labels)

        if max_workers > 1 and not serialized:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                predictions = list(pool.map(run, windows))
        else:
            predictions = [run(w) for w in windows]

        correct = 0
        for window, prediction in zip(windows, predictions):
            hit = prediction.label == window.intent
            correct += hit
            record = {
                'model': model,
                'scenario': spec.kind.value,
                'generator': spec.generator_name,
                'window_id': window.window_id,
                'gold': window.intent,
                'correct': hit,
            }
            record.update(prediction.to_dict())
            evaluation.predictions.append(record)

        result = ScenarioResult(model=model, scenario=spec.kind.value, t=correct, d=len(windows),
                                generator=spec.generator_name)
        evaluation.results.append(result)
        logger.info(f"{model} {spec.kind.value}: {correct}/{len(windows)} = {result.accuracy:.4f}")
    return evaluation


def apply_baseline(results: Sequence[ScenarioResult], baseline_accuracy: Optional[float]) -> None:
    """Set each result's delta (accuracy minus baseline accuracy) in place."""
    if baseline_accuracy is None:
        return
    for result in results:
        result.delta_vs_baseline = result.accuracy - baseline_accuracy
