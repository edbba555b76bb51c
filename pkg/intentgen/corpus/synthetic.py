"""Synthetic customer-service corpus.

Stand-in for a proprietary single-domain corpus: templated dialogues over
``action_object`` intents. First user utterances are often ambiguous (they
mention only the object), bot turns sometimes hint at the action, and the
third utterance states the request in full. Half of the dialogues end in a
human handoff and some repeat a bot turn, so the escalation and repetition
tasks have data.
"""

import random
from itertools import product
from typing import List, Optional, Tuple

from ..constants import DialogueSource, Speaker
from ..models.dialogue import Dialogue, Turn
from ..utils.errors import UsageError
from ..utils.logging import get_logger

logger = get_logger(__name__)

ACTIONS = (
    "activate", "cancel", "change", "close", "pay", "refund", "renew", "reset",
    "schedule", "track", "transfer", "update", "upgrade", "verify", "report",
)
OBJECTS = (
    "account", "address", "appointment", "card", "delivery", "device", "invoice",
    "loan", "membership", "order", "password", "plan", "subscription", "ticket",
    "warranty",
)
GENERIC_SLOTS = ("customer_name", "date", "amount", "email", "phone")

HANDOFF_TEXT = "Let me connect you with a human agent who can take it from here."
CLOSING_TEXT = "Glad I could help. Have a nice day!"

_EXPLICIT_OPENINGS = (
    "Hi, I want to {action} my {object}.",
    "Hello, can you {action} my {object}?",
    "I need to {action} the {object} on file.",
)
_AMBIGUOUS_OPENINGS = (
    "Hi, I have a question about my {object}.",
    "Hello, something is up with my {object}.",
    "I am calling about the {object}.",
    "Quick question regarding my {object}.",
)
_GENERIC_RESPONSES = (
    "Sure, I can help with your {object}. What would you like to do?",
    "Of course. Could you tell me more about the {object}?",
    "Happy to help with the {object}. What do you need?",
)
_HINT_RESPONSES = (
    "Do you want to {action} your {object}?",
    "I see. Are you looking to {action} the {object}?",
)
_THIRD_UTTERANCES = (
    "Yes, please {action} my {object} as soon as possible.",
    "I would like to {action} my {object}, thanks.",
    "Right, I need to {action} the {object} today.",
    "Exactly, {action} the {object} please.",
)
_FOLLOW_UP_RESPONSES = (
    "Anything else I should know about it?",
    "Could you confirm your details first?",
)
_FOLLOW_UP_USERS = (
    "No, just {action} the {object} for me.",
    "That is all, I only need to {action} my {object}.",
)


def intent_inventory(count: int, rng: random.Random) -> List[str]:
    """Pick ``count`` distinct action_object intent names, sorted."""
    combos = [f"{action}_{obj}" for action, obj in product(ACTIONS, OBJECTS)]
    if count > len(combos):
        raise UsageError(f"at most {len(combos)} synthetic intents available, requested {count}")
    return sorted(rng.sample(combos, count))


def _slots(obj: str, rng: random.Random) -> Tuple[str, ...]:
    extra = rng.sample(GENERIC_SLOTS, rng.randint(0, 2))
    return (f"{obj}_id",) + tuple(extra)


def _dialogue(index: int, intent: str, escalated: bool, rng: random.Random) -> Dialogue:
    action, obj = intent.split("_", 1)
    fill = {"action": action, "object": obj}
    turns: List[Tuple[Speaker, str, Optional[Tuple[str, ...]], Optional[str]]] = []

    openings = _EXPLICIT_OPENINGS if rng.random() < 0.3 else _AMBIGUOUS_OPENINGS
    turns.append((Speaker.USER, rng.choice(openings).format(**fill), _slots(obj, rng), intent))
    responses = _HINT_RESPONSES if rng.random() < 0.4 else _GENERIC_RESPONSES
    first_response = rng.choice(responses).format(**fill)
    turns.append((Speaker.BOT, first_response, _slots(obj, rng), None))
    turns.append((Speaker.USER, rng.choice(_THIRD_UTTERANCES).format(**fill), _slots(obj, rng), intent))

    if rng.random() < 0.25:
        # Longer window; half of these repeat the first bot turn verbatim
        repeat = rng.random() < 0.5
        follow_up = first_response if repeat else rng.choice(_FOLLOW_UP_RESPONSES)
        turns.append((Speaker.BOT, follow_up, _slots(obj, rng), None))
        turns.append((Speaker.USER, rng.choice(_FOLLOW_UP_USERS).format(**fill), _slots(obj, rng), intent))

    turns.append((Speaker.BOT, HANDOFF_TEXT if escalated else CLOSING_TEXT, None, None))

    return Dialogue(
        id=f"edu-{index:05d}",
        domain=obj,
        turns=tuple(
            Turn(index=i, speaker=speaker, text=text, slots=slots, intent=label)
            for i, (speaker, text, slots, label) in enumerate(turns)
        ),
        source=DialogueSource.SYNTHETIC,
        escalated=escalated,
    )


def synth_edu(intents: int, windows: int, seed: int) -> List[Dialogue]:
    """
    Generate a synthetic corpus with one intent window per dialogue.

    Args:
        intents: Number of distinct intents
        windows: Number of dialogues (each yields exactly one window)
        seed: Random seed; equal seeds give identical corpora

    Returns:
        Dialogues; every intent is used when ``windows >= intents`` and
        exactly ``windows // 2`` dialogues are escalated

    Raises:
        UsageError: if a count is not positive or exceeds the inventory
    """
    if intents <= 0 or windows <= 0:
        raise UsageError("intent and window counts must be positive")

    rng = random.Random(seed)
    labels = intent_inventory(intents, rng)

    assignment = [labels[i % len(labels)] for i in range(windows)]
    rng.shuffle(assignment)
    escalated = [i < windows // 2 for i in range(windows)]
    rng.shuffle(escalated)

    dialogues = [
        _dialogue(i, intent, flag, rng)
        for i, (intent, flag) in enumerate(zip(assignment, escalated))
    ]
    logger.info(f"Generated {len(dialogues)} synthetic dialogues over {len(labels)} intents")
    return dialogues
