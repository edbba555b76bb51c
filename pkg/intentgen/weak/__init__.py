"""Agreement-based weak labeling."""

from .classifiers import ClassifierBackend, SklearnClassifier, parse_classifier_spec
from .labeler import WeakLabelReport, weak_label, window_text

__all__ = [
    'ClassifierBackend',
    'SklearnClassifier',
    'parse_classifier_spec',
    'WeakLabelReport',
    'weak_label',
    'window_text',
]
