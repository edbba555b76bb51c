"""Unit tests for same-intent window extraction."""

import random
import time

import pytest

from intentgen.constants import DialogueSource, Speaker
from intentgen.corpus.windows import extract_intent_windows, truncate_windows
from intentgen.models.dialogue import Dialogue, Turn
from intentgen.utils.errors import UsageError

INTENTS = ["a", "b", "c", "d"]


def random_dialogue(index: int, rng: random.Random) -> Dialogue:
    """Alternating dialogue of up to 12 turns over up to 4 intents."""
    length = rng.randint(1, 12)
    first = rng.choice([Speaker.USER, Speaker.BOT])
    palette = rng.sample(INTENTS, rng.randint(1, 4))
    intent = rng.choice(palette)
    turns = []
    for i in range(length):
        speaker = first if i % 2 == 0 else (Speaker.BOT if first is Speaker.USER else Speaker.USER)
        label = None
        if speaker is Speaker.USER:
            if rng.random() < 0.35:
                intent = rng.choice(palette)
            label = intent
        turns.append(Turn(index=i, speaker=speaker, text=f"t{index}-{i}", intent=label))
    return Dialogue(id=f"r{index:03d}", domain="", turns=tuple(turns), source=DialogueSource.SYNTHETIC)


def brute_force_windows(dialogue: Dialogue):
    """Every maximal user-to-user slice whose user turns share one intent."""
    turns = dialogue.turns
    found = []
    for i, first in enumerate(turns):
        if not first.is_user:
            continue
        for j in range(i + 2, len(turns)):
            last = turns[j]
            if not last.is_user:
                continue
            users = [t for t in turns[i:j + 1] if t.is_user]
            if any(t.intent != first.intent for t in users):
                continue
            earlier = [t for t in turns[:i] if t.is_user]
            if earlier and earlier[-1].intent == first.intent:
                continue
            later = [t for t in turns[j + 1:] if t.is_user]
            if later and later[0].intent == first.intent:
                continue
            found.append((first.index, tuple(t.text for t in turns[i:j + 1]), first.intent))
    return found


class TestExtractIntentWindows:
    """Test maximal window extraction."""

    def test_matches_brute_force_scanner(self):
        """Test extraction against the brute-force scanner on 500 random dialogues."""
        rng = random.Random(2024)
        dialogues = [random_dialogue(i, rng) for i in range(500)]

        started = time.perf_counter()
        windows = extract_intent_windows(dialogues)
        elapsed = time.perf_counter() - started

        by_dialogue = {}
        for window in windows:
            by_dialogue.setdefault(window.dialogue_id, []).append(
                (window.start, tuple(window.texts), window.intent)
            )
        mismatches = [d.id for d in dialogues if by_dialogue.get(d.id, []) != brute_force_windows(d)]
        assert mismatches == []
        assert elapsed < 10

    def test_single_intent_dialogue(self, make_dialogue):
        """Test a five-turn single-intent dialogue yields one window."""
        dialogue = make_dialogue("x", "pay_bill", ["u1", "b1", "u2", "b2", "u3"])

        windows = extract_intent_windows([dialogue])

        assert len(windows) == 1
        assert windows[0].texts == ["u1", "b1", "u2", "b2", "u3"]
        assert windows[0].intent == "pay_bill"
        assert windows[0].window_id == "x:0"

    def test_trailing_bot_turn_is_dropped(self, make_dialogue):
        """Test windows end on a user turn."""
        dialogue = make_dialogue("x", "pay_bill", ["u1", "b1", "u2", "b2"])

        windows = extract_intent_windows([dialogue])

        assert windows[0].texts == ["u1", "b1", "u2"]

    def test_short_segments_are_dropped(self, make_dialogue):
        """Test dialogues shorter than three utterances give nothing."""
        assert extract_intent_windows([make_dialogue("x", "a", ["u1", "b1"])]) == []

    def test_intent_switch_splits_windows(self):
        """Test a switch of intent starts a new window."""
        turns = []
        for i, (speaker, intent) in enumerate([
            (Speaker.USER, "a"), (Speaker.BOT, None), (Speaker.USER, "a"), (Speaker.BOT, None),
            (Speaker.USER, "b"), (Speaker.BOT, None), (Speaker.USER, "b"),
        ]):
            turns.append(Turn(index=i, speaker=speaker, text=f"t{i}", intent=intent))
        dialogue = Dialogue(id="sw", domain="", turns=tuple(turns), source=DialogueSource.SYNTHETIC)

        windows = extract_intent_windows([dialogue])

        assert [(w.start, w.intent, len(w.utterances)) for w in windows] == [(0, "a", 3), (4, "b", 3)]

    def test_max_length_truncates(self, make_dialogue):
        """Test max_length keeps the first utterances and ends on a user turn."""
        dialogue = make_dialogue("x", "a", ["u1", "b1", "u2", "b2", "u3"])

        assert extract_intent_windows([dialogue], max_length=4)[0].texts == ["u1", "b1", "u2"]

    def test_max_length_below_minimum(self, make_dialogue):
        """Test a max_length under three is rejected."""
        with pytest.raises(UsageError):
            extract_intent_windows([make_dialogue("x", "a", ["u1", "b1", "u2"])], max_length=2)


class TestTruncateWindows:
    """Test window truncation."""

    def test_truncate_to_three(self, make_window):
        """Test five-utterance windows are cut to three."""
        window = make_window("x", "a", ["u1", "b1", "u2", "b2", "u3"])

        truncated = truncate_windows([window], 3)[0]

        assert truncated.texts == ["u1", "b1", "u2"]
        assert truncated.window_id == window.window_id
        assert truncated.split is window.split
