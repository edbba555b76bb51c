"""Task builders for the text-to-text multi-task regime."""

from .builders import (
    build_3ug_examples,
    build_escalation_examples,
    build_intent_examples,
    build_reorder_examples,
    build_repetition_examples,
    has_handoff_marker,
    utterance_similarity,
)
from .formatting import apply_markers, gen3_prompt, intent_prompt, parse_markers
from .mixture import build_mixture, reorder_share, task_counts

__all__ = [
    'build_intent_examples',
    'build_3ug_examples',
    'build_reorder_examples',
    'build_escalation_examples',
    'build_repetition_examples',
    'has_handoff_marker',
    'utterance_similarity',
    'apply_markers',
    'gen3_prompt',
    'intent_prompt',
    'parse_markers',
    'build_mixture',
    'reorder_share',
    'task_counts',
]
