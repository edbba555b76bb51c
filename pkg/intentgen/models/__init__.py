"""Data models for intentgen."""

from .dialogue import Turn, Dialogue, IntentWindow, CorpusSplits
from .task import TaskExample, MixtureSpec, LabelSpace, verbalize_label
from .prediction import LabelScore, GenerationResult, Prediction
from .conflict import ConflictCase, ConflictReport, CounterfactualBranch
from .run import EpochRecord, TrainingLog, StageRecord, RunManifest, ScenarioResult

__all__ = [
    'Turn',
    'Dialogue',
    'IntentWindow',
    'CorpusSplits',
    'TaskExample',
    'MixtureSpec',
    'LabelSpace',
    'verbalize_label',
    'LabelScore',
    'GenerationResult',
    'Prediction',
    'ConflictCase',
    'ConflictReport',
    'CounterfactualBranch',
    'EpochRecord',
    'TrainingLog',
    'StageRecord',
    'RunManifest',
    'ScenarioResult',
]
