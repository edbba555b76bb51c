#!/usr/bin/env python3
"""Weak labeling by agreement of two independently trained classifiers."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..constants import SplitName
from ..models.dialogue import IntentWindow
from ..tasks.formatting import serialize_turns
from ..utils.errors import UsageError
from ..utils.logging import get_logger
from .classifiers import ClassifierBackend

logger = get_logger(__name__)


@dataclass
class WeakLabelReport:
    """Outcome of one weak-labeling pass."""

    total_unlabeled: int
    agreed: int
    added: List[Tuple[str, str]] = field(default_factory=list)
    dev_accuracy: Dict[str, float] = field(default_factory=dict)
    windows: List[IntentWindow] = field(default_factory=list, repr=False)
    utterances: int = 1

    @property
    def agreement_rate(self) -> float:
        return self.agreed / self.total_unlabeled if self.total_unlabeled else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'total_unlabeled': self.total_unlabeled,
            'agreed': self.agreed,
            'agreement_rate': self.agreement_rate,
            'added': [list(pair) for pair in self.added],
            'dev_accuracy': dict(self.dev_accuracy),
            'utterances': self.utterances,
        }


def window_text(window: IntentWindow, utterances: int = 1) -> str:
    """Classifier input: the first utterance, or the first k speaker-tagged utterances."""
    if utterances == 1:
        return window.utterances[0].text
    return serialize_turns(window.head(utterances))


def weak_label(unlabeled: Sequence[IntentWindow], supervised: Sequence[IntentWindow],
               backends: Sequence[ClassifierBackend], utterances: int = 1,
               dev: Optional[Sequence[IntentWindow]] = None,
               max_workers: int = 2) -> WeakLabelReport:
    """
    Label unlabeled windows on which both classifiers agree.

    Args:
        unlabeled: Windows without labels
        supervised: Labeled training windows
        backends: Exactly two distinct classifier instances
        utterances: Number of leading utterances the classifiers see
        dev: Optional labeled windows for per-classifier accuracy
        max_workers: Threads used to fit the two classifiers

    Returns:
        WeakLabelReport whose ``windows`` form the weak split

    Raises:
        UsageError: unless exactly two distinct backends are given
    """
    if len(backends) != 2:
        raise UsageError(f"weak labeling needs exactly 2 classifiers, got {len(backends)}")
    if backends[0] is backends[1]:
        raise UsageError("weak labeling needs two distinct classifier instances")
    if utterances not in (1, 2, 3):
        raise UsageError(f"utterances must be 1, 2 or 3, got {utterances}")

    train = [(window_text(w, utterances), w.intent) for w in supervised if w.intent is not None]
    if not train:
        raise UsageError("weak labeling needs labeled supervised windows")

    with ThreadPoolExecutor(max_workers=max(1, min(2, max_workers))) as pool:
        list(pool.map(lambda backend: backend.fit(train), backends))

    texts = [window_text(w, utterances) for w in unlabeled]
    first = backends[0].predict_many(texts)
    second = backends[1].predict_many(texts)

    added: List[Tuple[str, str]] = []
    windows: List[IntentWindow] = []
    for window, (label_a, _), (label_b, _) in zip(unlabeled, first, second):
        if label_a == label_b:
            added.append((window.window_id, label_a))
            windows.append(window.with_intent(label_a).with_split(SplitName.WEAK))

    accuracy: Dict[str, float] = {}
    if dev:
        dev_texts = [window_text(w, utterances) for w in dev]
        for position, backend in enumerate(backends):
            predictions = backend.predict_many(dev_texts)
            correct = sum(label == w.intent for (label, _), w in zip(predictions, dev))
            accuracy[f"{position}:{backend.name}"] = correct / len(dev)

    report = WeakLabelReport(
        total_unlabeled=len(unlabeled),
        agreed=len(added),
        added=added,
        dev_accuracy=accuracy,
        windows=windows,
        utterances=utterances,
    )
    logger.info(f"Weak labeling: {report.agreed}/{report.total_unlabeled} windows agreed")
    return report
