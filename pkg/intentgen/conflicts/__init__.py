"""Counterfactual conflict resolution."""

from .resolver import (
    BotResponseIndex,
    ConflictRun,
    error_reduction,
    mimic_bot_response,
    resolve,
    run_conflicts,
    select_conflicts,
)

__all__ = [
    'BotResponseIndex',
    'ConflictRun',
    'error_reduction',
    'mimic_bot_response',
    'resolve',
    'run_conflicts',
    'select_conflicts',
]
