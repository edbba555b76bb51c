"""Unit tests for task builders and serialization."""

import random

import pytest

from intentgen.constants import DialogueSource, TaskName
from intentgen.corpus.synthetic import synth_edu
from intentgen.corpus.windows import extract_intent_windows
from intentgen.tasks.builders import (
    build_3ug_examples,
    build_escalation_examples,
    build_intent_examples,
    build_reorder_examples,
    build_repetition_examples,
    random_derangement_order,
    utterance_similarity,
)
from intentgen.tasks.formatting import apply_markers, parse_markers, serialize_turn
from intentgen.utils.errors import TaskNotApplicableError, UsageError, ValidationError


class TestIntentExamples:
    """Test intent-prediction examples."""

    def test_first_utterance_form(self, make_window):
        """Test k=1 keeps only the first user utterance."""
        window = make_window("d1", "book_hotel", ["I need a room", "Where?", "In town"])

        example = build_intent_examples([window], 1)[0]

        assert example.task is TaskName.INTENT
        assert example.input_text == "intent: [user] I need a room"
        assert example.target_text == "book hotel"
        assert example.origin == "d1:0"

    def test_three_utterance_form(self, make_window):
        """Test k=3 serializes all three utterances with speaker tags."""
        window = make_window("d1", "book_hotel", ["I need a room", "Where?", "In town"])

        example = build_intent_examples([window], 3)[0]

        assert example.input_text == "intent: [user] I need a room | [bot] Where? | [user] In town"

    def test_unlabeled_windows_skipped(self, make_window):
        """Test windows without a label produce no example."""
        windows = [make_window("d1", None, ["a", "b", "c"]), make_window("d2", "x", ["a", "b", "c"])]

        assert [e.origin for e in build_intent_examples(windows, 3)] == ["d2:0"]

    def test_invalid_k(self, make_window):
        """Test k outside 1..3 is rejected."""
        with pytest.raises(UsageError):
            build_intent_examples([make_window("d1", "x", ["a", "b", "c"])], 4)


class TestThirdUtteranceExamples:
    """Test 3UG examples."""

    def test_input_and_target(self, make_window):
        """Test the first two utterances predict the third."""
        window = make_window("d1", None, ["Hi there", "How can I help?", "Cancel my order"])

        example = build_3ug_examples([window])[0]

        assert example.task is TaskName.GEN3
        assert example.input_text == "gen3: [user] Hi there | [bot] How can I help?"
        assert example.target_text == "Cancel my order"


class TestReorderExamples:
    """Test utterance reordering examples."""

    def test_round_trip_on_synthetic_windows(self):
        """Test the target permutation restores every window of up to five utterances."""
        windows = extract_intent_windows(synth_edu(intents=30, windows=1000, seed=11))
        windows = [w for w in windows if len(w.utterances) <= 5]
        assert len(windows) == 1000

        examples = build_reorder_examples(windows, seed=3)

        restored_count = 0
        for window, example in zip(windows, examples):
            body = example.input_text[len("reorder:"):].strip()
            parts = body.split(" | ")
            slots = [part.split(") ", 1)[1] for part in parts]
            restored = apply_markers(slots, parse_markers(example.target_text))
            restored_count += restored == [serialize_turn(t) for t in window.utterances]
        assert restored_count == len(windows)

    def test_shuffle_is_never_identity(self):
        """Test derangement orders differ from the identity."""
        rng = random.Random(0)
        for length in (3, 4, 5):
            for _ in range(200):
                assert random_derangement_order(length, rng) != list(range(length))

    def test_marker_convention(self):
        """Test [A, B, C] shuffled to [C, A, B] is restored by (2) (3) (1)."""
        assert apply_markers(["C", "A", "B"], parse_markers("(2) (3) (1)")) == ["A", "B", "C"]

    def test_invalid_marker_text(self):
        """Test non-permutations are rejected."""
        with pytest.raises(ValidationError):
            parse_markers("(1) (1) (3)")

    def test_seeded(self, labeled_windows):
        """Test equal seeds shuffle identically."""
        assert build_reorder_examples(labeled_windows, 9) == build_reorder_examples(labeled_windows, 9)


class TestEscalationExamples:
    """Test escalation examples."""

    def test_flag_and_heuristic(self, make_dialogue):
        """Test the escalated flag wins and the handoff heuristic fills gaps."""
        dialogues = [
            make_dialogue("a", "x", ["hi", "ok", "bye"], escalated=True),
            make_dialogue("b", "x", ["hi", "I will connect you with a live agent", "thanks"]),
            make_dialogue("c", "x", ["hi", "done", "thanks"]),
        ]

        targets = [e.target_text for e in build_escalation_examples(dialogues)]

        assert targets == ["true", "true", "false"]

    def test_sgd_not_applicable(self, make_dialogue):
        """Test schema-guided corpora have no escalation task."""
        dialogue = make_dialogue("s", "x", ["hi", "ok", "bye"], source=DialogueSource.SGD)

        with pytest.raises(TaskNotApplicableError):
            build_escalation_examples([dialogue])


class TestRepetitionExamples:
    """Test repetition detection."""

    def test_repeated_bot_turn(self, make_dialogue):
        """Test a repeated bot turn is flagged."""
        repeated = make_dialogue("r", "x", ["hi", "Could you repeat that?", "what", "Could you repeat that?", "ok"])
        plain = make_dialogue("p", "x", ["hi", "Sure thing", "thanks for everything"])

        targets = [e.target_text for e in build_repetition_examples([repeated, plain])]

        assert targets == ["true", "false"]

    def test_zero_threshold_flags_any_pair(self, make_dialogue):
        """Test threshold 0 marks every dialogue with two same-speaker turns."""
        dialogue = make_dialogue("p", "x", ["hi", "Sure thing", "thanks for everything"])

        assert build_repetition_examples([dialogue], 0.0)[0].target_text == "true"

    def test_threshold_range(self, make_dialogue):
        """Test thresholds outside [0, 1] are rejected."""
        with pytest.raises(UsageError):
            build_repetition_examples([make_dialogue("p", "x", ["a", "b", "c"])], 1.5)

    def test_similarity(self):
        """Test edit-distance similarity."""
        assert utterance_similarity("abc", "abd") == pytest.approx(2 / 3)
        assert utterance_similarity("Hello", "hello") == 1.0
        assert utterance_similarity("", "") == 1.0
