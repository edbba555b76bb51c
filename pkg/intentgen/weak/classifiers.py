#!/usr/bin/env python3
"""Utterance classifiers used for agreement-based weak labeling."""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.linear_model import LogisticRegression, SGDClassifier
from sklearn.naive_bayes import MultinomialNB
from sklearn.pipeline import Pipeline

from ..utils.errors import BackendStateError, UsageError
from ..utils.logging import get_logger

logger = get_logger(__name__)


class ClassifierBackend(ABC):
    """A text classifier trained on (text, label) pairs."""

    name: str = "classifier"

    @abstractmethod
    def fit(self, examples: Sequence[Tuple[str, str]]) -> 'ClassifierBackend':
        """Train on labeled texts."""

    @abstractmethod
    def predict(self, text: str) -> Tuple[str, float]:
        """Return (label, score) with score in [0, 1]."""

    def predict_many(self, texts: Sequence[str]) -> List[Tuple[str, float]]:
        return [self.predict(text) for text in texts]


class SklearnClassifier(ClassifierBackend):
    """TF-IDF features with a linear or naive-Bayes classifier."""

    MODELS = ('sgd', 'logreg', 'nb')

    def __init__(self, model: str = 'sgd', seed: int = 13, **params: Any):
        if model not in self.MODELS:
            raise UsageError(f"unknown classifier '{model}'; expected one of {', '.join(self.MODELS)}")
        self.model = model
        self.seed = seed
        self.params = params
        self.name = f"{model}:seed={seed}"
        self._pipeline: Optional[Pipeline] = None
        self._constant: Optional[str] = None

    def _estimator(self):
        if self.model == 'sgd':
            return SGDClassifier(loss='log_loss', random_state=self.seed, **self.params)
        if self.model == 'logreg':
            return LogisticRegression(max_iter=1000, random_state=self.seed, **self.params)
        return MultinomialNB(**self.params)

    def fit(self, examples: Sequence[Tuple[str, str]]) -> 'SklearnClassifier':
        if not examples:
            raise UsageError("cannot fit a classifier on zero examples")
        texts = [text for text, _ in examples]
        labels = [label for _, label in examples]
        if len(set(labels)) == 1:
            self._constant = labels[0]
            self._pipeline = None
            return self
        self._constant = None
        self._pipeline = Pipeline([
            ('tfidf', TfidfVectorizer(ngram_range=(1, 2), lowercase=True)),
            ('clf', self._estimator()),
        ])
        self._pipeline.fit(texts, labels)
        logger.info(f"Fitted {self.name} on {len(examples)} examples")
        return self

    def predict_many(self, texts: Sequence[str]) -> List[Tuple[str, float]]:
        if self._constant is not None:
            return [(self._constant, 1.0) for _ in texts]
        if self._pipeline is None:
            raise BackendStateError(f"classifier {self.name} used before fit")
        if not texts:
            return []
        probabilities = self._pipeline.predict_proba(list(texts))
        classes = self._pipeline.classes_
        # argmax picks the first (lowest-index) class on ties
        best = np.argmax(probabilities, axis=1)
        return [(str(classes[i]), float(row[i])) for i, row in zip(best, probabilities)]

    def predict(self, text: str) -> Tuple[str, float]:
        return self.predict_many([text])[0]


def parse_classifier_spec(spec: str) -> ClassifierBackend:
    """
    Build a classifier from "name[:key=value,...]".

    Examples: "sgd", "sgd:seed=29", "logreg:seed=7,C=2.0", "nb:alpha=0.5".
    """
    name, _, rest = spec.strip().partition(':')
    params: Dict[str, Any] = {}
    for item in filter(None, (p.strip() for p in rest.split(','))):
        key, sep, value = item.partition('=')
        if not sep:
            raise UsageError(f"invalid classifier option '{item}' in '{spec}'")
        params[key.strip()] = _coerce(value.strip())
    seed = int(params.pop('seed', 13))
    return SklearnClassifier(name, seed=seed, **params)


def _coerce(value: str) -> Any:
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value
