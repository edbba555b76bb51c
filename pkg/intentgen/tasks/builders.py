#!/usr/bin/env python3
"""Builders turning windows and dialogues into TaskExamples."""

import random
import re
from itertools import combinations
from typing import Iterable, List, Sequence

import Levenshtein

from ..constants import (
    DEFAULT_REPETITION_THRESHOLD,
    FALSE_TARGET,
    TRUE_TARGET,
    DialogueSource,
    Speaker,
    TaskName,
)
from ..models.dialogue import Dialogue, IntentWindow
from ..models.task import TaskExample, verbalize_label
from ..utils.errors import TaskNotApplicableError, UsageError
from ..utils.logging import get_logger
from .formatting import (
    format_markers,
    gen3_prompt,
    intent_prompt,
    reorder_body,
    serialize_turns,
    task_input,
)

logger = get_logger(__name__)

HANDOFF_PATTERN = re.compile(
    r"\b(human agent|live agent|real person|representative|connect you with|transfer you to)\b",
    re.IGNORECASE,
)


def build_intent_examples(windows: Iterable[IntentWindow], k_utterances: int) -> List[TaskExample]:
    """
    Build intent-prediction examples from the first k utterances.

    Args:
        windows: Labeled windows
        k_utterances: 1 (SUC form), 2 or 3 (SDC form)

    Returns:
        One example per labeled window; unlabeled windows are skipped
    """
    if k_utterances not in (1, 2, 3):
        raise UsageError(f"k_utterances must be 1, 2 or 3, got {k_utterances}")

    examples = []
    skipped = 0
    for window in windows:
        if window.intent is None:
            skipped += 1
            continue
        examples.append(TaskExample(
            task=TaskName.INTENT,
            input_text=intent_prompt(window.head(k_utterances)),
            target_text=verbalize_label(window.intent),
            origin=window.window_id,
            split=window.split.value,
            meta={'k': k_utterances},
        ))
    if skipped:
        logger.warning(f"Skipped {skipped} unlabeled windows while building intent examples")
    return examples


def build_3ug_examples(windows: Iterable[IntentWindow]) -> List[TaskExample]:
    """Third-utterance generation: (u1, b1) -> u2. Labels are never read."""
    return [
        TaskExample(
            task=TaskName.GEN3,
            input_text=gen3_prompt(window.head(2)),
            target_text=window.utterances[2].text,
            origin=window.window_id,
            split=window.split.value,
        )
        for window in windows
    ]


def random_derangement_order(length: int, rng: random.Random) -> List[int]:
    """Uniform non-identity permutation of range(length) by rejection."""
    identity = list(range(length))
    order = identity[:]
    while order == identity:
        rng.shuffle(order)
    return order


def build_reorder_examples(windows: Iterable[IntentWindow], seed: int) -> List[TaskExample]:
    """
    Utterance-reordering examples.

    The input lists the shuffled utterances tagged (1), (2), ...; the target
    gives, for each original position, the marker of the slot that holds it.
    [A, B, C] shuffled to [C, A, B] has target "(2) (3) (1)".

    Args:
        windows: Windows of at least three utterances
        seed: Shuffle seed

    Returns:
        One example per window
    """
    rng = random.Random(seed)
    examples = []
    for window in windows:
        utterances = window.utterances
        order = random_derangement_order(len(utterances), rng)
        shuffled = [utterances[i] for i in order]
        slot_of = {original: slot for slot, original in enumerate(order, start=1)}
        markers = [slot_of[i] for i in range(len(utterances))]
        examples.append(TaskExample(
            task=TaskName.REORDER,
            input_text=task_input(TaskName.REORDER, reorder_body(shuffled)),
            target_text=format_markers(markers),
            origin=window.window_id,
            split=window.split.value,
        ))
    return examples


def has_handoff_marker(dialogue: Dialogue) -> bool:
    """True when a bot turn hands the conversation to a human."""
    return any(
        turn.speaker is Speaker.BOT and HANDOFF_PATTERN.search(turn.text)
        for turn in dialogue.turns
    )


def build_escalation_examples(dialogues: Sequence[Dialogue]) -> List[TaskExample]:
    """
    Escalation examples over full conversations.

    Uses the dialogue's escalated flag, falling back to the handoff-marker
    heuristic (no marker means "false").

    Raises:
        TaskNotApplicableError: for schema-guided corpora, which have no handoffs
    """
    if any(d.source is DialogueSource.SGD for d in dialogues):
        raise TaskNotApplicableError("escalation is not applicable to SGD dialogues")

    examples = []
    for dialogue in dialogues:
        escalated = dialogue.escalated
        if escalated is None:
            escalated = has_handoff_marker(dialogue)
        examples.append(TaskExample(
            task=TaskName.ESCALATION,
            input_text=task_input(TaskName.ESCALATION, serialize_turns(dialogue.turns)),
            target_text=TRUE_TARGET if escalated else FALSE_TARGET,
            origin=dialogue.id,
        ))
    return examples


def utterance_similarity(a: str, b: str) -> float:
    """1 - edit_distance / max_length on lowercased text."""
    a, b = a.lower(), b.lower()
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - Levenshtein.distance(a, b) / longest


def has_repetition(dialogue: Dialogue, threshold: float) -> bool:
    """True when two same-speaker utterances are at least ``threshold`` similar."""
    for speaker in Speaker:
        texts = [t.text for t in dialogue.turns if t.speaker is speaker]
        if any(utterance_similarity(a, b) >= threshold for a, b in combinations(texts, 2)):
            return True
    return False


def build_repetition_examples(dialogues: Iterable[Dialogue],
                              similarity_threshold: float = DEFAULT_REPETITION_THRESHOLD) -> List[TaskExample]:
    """
    Repetition examples: "true" iff some same-speaker pair is near-identical.

    Args:
        dialogues: Dialogues to label
        similarity_threshold: Similarity in [0, 1]; 0 marks every dialogue
            with a same-speaker pair

    Returns:
        One example per dialogue
    """
    if not 0.0 <= similarity_threshold <= 1.0:
        raise UsageError(f"similarity threshold {similarity_threshold} outside [0, 1]")

    return [
        TaskExample(
            task=TaskName.REPETITION,
            input_text=task_input(TaskName.REPETITION, serialize_turns(dialogue.turns)),
            target_text=TRUE_TARGET if has_repetition(dialogue, similarity_threshold) else FALSE_TARGET,
            origin=dialogue.id,
        )
        for dialogue in dialogues
    ]
