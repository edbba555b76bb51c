"""Look-ahead inference scenarios."""

from .scenarios import (
    Evaluation,
    ScenarioSpec,
    apply_baseline,
    evaluate,
    majority_vote,
    predict_scenario,
)

__all__ = [
    'Evaluation',
    'ScenarioSpec',
    'apply_baseline',
    'evaluate',
    'majority_vote',
    'predict_scenario',
]
