"""Text serialization for task inputs and targets."""

import re
from typing import List, Sequence

from ..constants import SPEAKER_TAGS, TASK_PREFIXES, UTTERANCE_SEPARATOR, Speaker, TaskName
from ..models.dialogue import Turn
from ..utils.errors import ValidationError

_MARKER_RE = re.compile(r"\((\d+)\)")


def serialize_turn(turn: Turn) -> str:
    return f"{SPEAKER_TAGS[turn.speaker]} {turn.text}"


def serialize_turns(turns: Sequence[Turn]) -> str:
    """Speaker-tagged utterances joined by the separator."""
    return UTTERANCE_SEPARATOR.join(serialize_turn(t) for t in turns)


def task_input(task: TaskName, body: str) -> str:
    """Prefix a serialized body with the task prefix."""
    prefix = TASK_PREFIXES[task]
    return f"{prefix} {body}" if body else prefix


def intent_prompt(turns: Sequence[Turn]) -> str:
    """Classification prompt over the given utterances."""
    return task_input(TaskName.INTENT, serialize_turns(turns))


def gen3_prompt(turns: Sequence[Turn]) -> str:
    """Third-utterance generation prompt; an empty sequence gives the context-free prompt."""
    return task_input(TaskName.GEN3, serialize_turns(turns))


def user_turn(text: str, index: int) -> Turn:
    """A generated user utterance placed at ``index``."""
    return Turn(index=index, speaker=Speaker.USER, text=text)


def format_markers(markers: Sequence[int]) -> str:
    return " ".join(f"({m})" for m in markers)


def parse_markers(text: str) -> List[int]:
    """Position markers of a reorder target, e.g. "(2) (3) (1)" -> [2, 3, 1]."""
    markers = [int(m) for m in _MARKER_RE.findall(text)]
    if sorted(markers) != list(range(1, len(markers) + 1)):
        raise ValidationError(f"'{text}' is not a marker permutation")
    return markers


def reorder_body(shuffled: Sequence[Turn]) -> str:
    """Shuffled utterances, each tagged with its slot marker."""
    return UTTERANCE_SEPARATOR.join(
        f"({i}) {serialize_turn(turn)}" for i, turn in enumerate(shuffled, start=1)
    )


def apply_markers(shuffled: Sequence, markers: Sequence[int]) -> List:
    """Restore the original order: the i-th marker names the slot holding utterance i."""
    return [shuffled[m - 1] for m in markers]
