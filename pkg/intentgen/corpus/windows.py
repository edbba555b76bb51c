"""Same-intent window extraction."""

from typing import Iterable, List, Optional

from ..constants import MIN_WINDOW_LENGTH
from ..models.dialogue import Dialogue, IntentWindow, Turn
from ..utils.errors import UsageError
from ..utils.logging import get_logger

logger = get_logger(__name__)


def _segments(turns: Iterable[Turn]) -> List[List[Turn]]:
    """
    Split an alternating dialogue into same-intent segments.

    A new segment starts at each user turn whose intent differs from the
    previous user turn's; the bot turn before it stays with the earlier
    segment. Leading bot turns belong to no segment.
    """
    segments: List[List[Turn]] = []
    current: List[Turn] = []
    current_intent: Optional[str] = None
    for turn in turns:
        if turn.is_user:
            if not current or turn.intent != current_intent:
                if current:
                    segments.append(current)
                current = [turn]
                current_intent = turn.intent
                continue
        elif not current:
            continue
        current.append(turn)
    if current:
        segments.append(current)
    return segments


def extract_intent_windows(dialogues: Iterable[Dialogue],
                           max_length: Optional[int] = None) -> List[IntentWindow]:
    """
    Extract maximal user-initiated same-intent windows.

    Args:
        dialogues: Canonicalized dialogues
        max_length: Truncate windows to their first ``max_length`` utterances
            (None keeps maximal windows)

    Returns:
        Windows of at least three utterances, each starting and ending with a
        user turn, in dialogue order
    """
    if max_length is not None and max_length < MIN_WINDOW_LENGTH:
        raise UsageError(f"max window length must be at least {MIN_WINDOW_LENGTH}, got {max_length}")
    windows: List[IntentWindow] = []
    dropped = 0
    for dialogue in dialogues:
        for segment in _segments(dialogue.turns):
            if not segment[-1].is_user:
                segment = segment[:-1]
            if len(segment) < MIN_WINDOW_LENGTH:
                dropped += 1
                continue
            if max_length is not None:
                segment = segment[:max_length]
                if not segment[-1].is_user:
                    segment = segment[:-1]
            windows.append(IntentWindow(
                dialogue_id=dialogue.id,
                intent=segment[0].intent,
                utterances=tuple(segment),
                start=segment[0].index,
            ))

    logger.info(f"Extracted {len(windows)} intent windows ({dropped} short segments dropped)")
    return windows


def truncate_windows(windows: Iterable[IntentWindow], max_length: int) -> List[IntentWindow]:
    """Cut windows down to their first ``max_length`` utterances, ending on a user turn."""
    result = []
    for window in windows:
        utterances = window.utterances[:max_length]
        if not utterances[-1].is_user:
            utterances = utterances[:-1]
        result.append(IntentWindow(
            dialogue_id=window.dialogue_id,
            intent=window.intent,
            utterances=utterances,
            split=window.split,
            start=window.start,
        ))
    return result
