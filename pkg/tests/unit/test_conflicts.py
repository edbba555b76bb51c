"""Unit tests for counterfactual conflict resolution."""

import re

import pytest

from intentgen.backends import OracleBackend
from intentgen.constants import ConflictMode, ResolutionRule, Speaker, SplitName
from intentgen.conflicts import (
    BotResponseIndex,
    error_reduction,
    mimic_bot_response,
    resolve,
    run_conflicts,
    select_conflicts,
)
from intentgen.models.conflict import ConflictCase
from intentgen.models.dialogue import Turn
from intentgen.models.prediction import LabelScore
from intentgen.models.task import LabelSpace
from intentgen.utils.errors import GenerationError, UndefinedMetricError, UsageError, ValidationError

LABELS = ["billing", "booking", "cancel", "delivery", "refund", "support"]
# Case types: A confident and right, B right but unsure, C wrong with gold second, D wrong with gold third
CASE_TYPES = [("A", 100), ("B", 40), ("C", 40), ("D", 20)]
CASE_RE = re.compile(r"type (\w) slot (\d+) gold (\w+)")
REPLY_RE = re.compile(r"agent reply for (\w+)")


def prior(kind: str, gold: int):
    n = len(LABELS)
    wrong, wrong2 = (gold + 1) % n, (gold + 2) % n
    if kind == "A":
        weights = {gold: 0.9}
        rest = 0.02
    elif kind == "B":
        weights = {gold: 0.45, wrong: 0.40}
        rest = 0.0375
    elif kind == "C":
        weights = {wrong: 0.5, gold: 0.35}
        rest = 0.0375
    else:
        weights = {wrong: 0.5, wrong2: 0.25, gold: 0.1}
        rest = 0.05
    return [weights.get(i, rest) for i in range(n)]


def counterfactual_classifier(reliable_share: int):
    """
    First utterances get the case type's prior; look-ahead conversations are
    judged correctly for ``reliable_share`` of every ten cases.
    """
    def score(prompt, labels):
        kind, slot, gold_name = CASE_RE.search(prompt).groups()
        gold = LABELS.index(gold_name)
        if prompt.count("[user]") + prompt.count("[bot]") == 1:
            return prior(kind, gold)
        branch = LABELS.index(REPLY_RE.search(prompt).group(1))
        if int(slot) % 10 < reliable_share:
            chosen = gold
        else:
            chosen = branch if branch != gold else (gold + 3) % len(LABELS)
        return [10.0 if i == chosen else 1.0 for i in range(len(labels))]
    return score


@pytest.fixture
def cases(make_window):
    windows = []
    k = 0
    for kind, count in CASE_TYPES:
        for slot in range(count):
            gold = LABELS[k % len(LABELS)]
            windows.append(make_window(
                f"k{k:03d}", gold,
                [f"case {k} type {kind} slot {slot} gold {gold}", f"agent reply for {gold}", "logged third"],
                SplitName.TEST,
                slots=[None, ["account"], None],
            ))
            k += 1
    return windows


def run_mode(cases, mode, reliable_share=7, rule=ResolutionRule.MAX):
    classifier = OracleBackend(score_fn=counterfactual_classifier(reliable_share))
    generator = OracleBackend(generate_fn=lambda prompt, n, seed: ["follow up"] * n)
    return run_conflicts(cases, classifier, generator, LabelSpace(LABELS), cases, mode,
                         threshold=0.3, rule=rule, seed=1)


class TestRunConflicts:
    """Test conflict detection and resolution end to end."""

    def test_perfect_classifier_fixes_every_conflict(self, cases):
        """Test conflict_oracle with a perfect counterfactual classifier gives error reduction 1.0."""
        report = run_mode(cases, ConflictMode.CONFLICT_ORACLE, reliable_share=10).report

        assert report.conflicts_found == 40
        assert report.mistakes_before == 40
        assert report.mistakes_after == 0
        assert report.error_reduction == 1.0

    def test_mode_ordering(self, cases):
        """Test conflict_oracle > mistake_oracle > threshold with a partially reliable classifier."""
        reductions = {mode: run_mode(cases, mode).report for mode in ConflictMode}

        conflict = reductions[ConflictMode.CONFLICT_ORACLE]
        mistake = reductions[ConflictMode.MISTAKE_ORACLE]
        threshold = reductions[ConflictMode.THRESHOLD]
        assert conflict.error_reduction > mistake.error_reduction > threshold.error_reduction
        assert (conflict.conflicts_found, conflict.fixed, conflict.broken) == (40, 28, 0)
        assert (mistake.conflicts_found, mistake.fixed, mistake.broken) == (60, 28, 0)
        assert (threshold.conflicts_found, threshold.fixed, threshold.broken) == (80, 28, 12)
        assert conflict.error_reduction == pytest.approx(0.7)
        assert mistake.error_reduction == pytest.approx(28 / 60)
        assert threshold.error_reduction == pytest.approx(0.4)

    def test_average_rule(self, cases):
        """Test the averaging rule also resolves reliable conflicts."""
        report = run_mode(cases, ConflictMode.CONFLICT_ORACLE, reliable_share=10,
                          rule=ResolutionRule.AVERAGE).report

        assert report.error_reduction == 1.0

    def test_final_stays_within_candidates(self, cases):
        """Test every final intent is one of the two candidates."""
        run = run_mode(cases, ConflictMode.MISTAKE_ORACLE)

        assert all(case.final in case.intents for case in run.cases)
        assert all(len(case.branches) == 2 for case in run.cases)

    def test_audit_record(self, cases):
        """Test per-case records carry the six scores."""
        case = run_mode(cases, ConflictMode.CONFLICT_ORACLE).cases[0]

        record = case.to_dict()

        assert set(record['scores']) == {'a1', 'a2', 'b1', 'b2', 'c1', 'c2'}
        assert record['branches'][0]['third_utterance'] == "follow up"
        assert record['mode'] == "conflict_oracle"

    def test_no_mistakes_leaves_reduction_undefined(self, cases):
        """Test a mode with no prior mistakes reports no error reduction."""
        confident = [w for w in cases if "type A" in w.utterances[0].text]

        report = run_mode(confident, ConflictMode.MISTAKE_ORACLE).report

        assert report.conflicts_found == 0
        assert report.error_reduction is None


class TestSelectConflicts:
    """Test conflict selection."""

    @pytest.fixture
    def predictions(self):
        return {
            'w1': [LabelScore("a", 0.6), LabelScore("b", 0.35), LabelScore("c", 0.05)],
            'w2': [LabelScore("a", 0.9), LabelScore("b", 0.05), LabelScore("c", 0.05)],
            'w3': [LabelScore("b", 0.5), LabelScore("c", 0.3), LabelScore("a", 0.2)],
        }

    def test_threshold(self, predictions):
        """Test two labels above the bound make a conflict between the top two."""
        conflicts = select_conflicts(predictions, None, "threshold", 0.3)

        assert conflicts == [('w1', [("a", 0.6), ("b", 0.35)])]

    def test_oracle_modes(self, predictions):
        """Test conflict_oracle picks the mistakes whose runner-up is gold."""
        gold = {'w1': 'b', 'w2': 'a', 'w3': 'a'}

        mistakes = select_conflicts(predictions, gold, ConflictMode.MISTAKE_ORACLE)
        conflicts = select_conflicts(predictions, gold, ConflictMode.CONFLICT_ORACLE)

        assert [w for w, _ in mistakes] == ['w1', 'w3']
        assert [w for w, _ in conflicts] == ['w1']
        assert {w for w, _ in conflicts} <= {w for w, _ in mistakes}

    def test_oracle_needs_gold(self, predictions):
        with pytest.raises(UsageError):
            select_conflicts(predictions, None, "mistake_oracle")

    @pytest.mark.parametrize("threshold", [0.0, 1.0, 1.5])
    def test_threshold_range(self, predictions, threshold):
        with pytest.raises(UsageError):
            select_conflicts(predictions, None, "threshold", threshold)


class TestBotResponses:
    """Test borrowed bot responses."""

    def test_slot_overlap_wins(self, make_window):
        """Test the response sharing most slot names with the gold response is chosen."""
        corpus = [
            make_window("a", "pay", ["u", "Which card?", "u"], slots=[None, ["card"], None]),
            make_window("b", "pay", ["u", "Which card and amount?", "u"], slots=[None, ["card", "amount"], None]),
            make_window("c", "pay", ["u", "Ok.", "u"], slots=[None, [], None]),
        ]
        gold = Turn(index=1, speaker=Speaker.BOT, text="x", slots=("amount", "card", "date"))

        assert mimic_bot_response("pay", corpus, gold).text == "Which card and amount?"

    def test_ties_go_to_shortest(self, make_window):
        corpus = [
            make_window("a", "pay", ["u", "A longer reply", "u"]),
            make_window("b", "pay", ["u", "Short", "u"]),
        ]
        gold = Turn(index=1, speaker=Speaker.BOT, text="x")

        assert mimic_bot_response("pay", corpus, gold).text == "Short"

    def test_fallback_to_most_frequent(self, make_window):
        """Test an intent without responses borrows the most frequent one and flags it."""
        corpus = [
            make_window("a", "pay", ["u", "Sure", "u"]),
            make_window("b", "ship", ["u", "Sure", "u"]),
            make_window("c", "ship", ["u", "Where to?", "u"]),
        ]
        gold = Turn(index=1, speaker=Speaker.BOT, text="x")

        response, fallback = BotResponseIndex(corpus).find("refund", gold)

        assert response.text == "Sure"
        assert fallback is True

    def test_empty_corpus(self):
        gold = Turn(index=1, speaker=Speaker.BOT, text="x")

        with pytest.raises(UsageError):
            BotResponseIndex([]).find("pay", gold)


class TestResolve:
    """Test single-case resolution."""

    def test_generation_failure_keeps_prior(self, make_window):
        """Test a failing generator leaves the prior top intent and a flag."""
        def broken(prompt, n, seed):
            raise GenerationError("empty output")

        corpus = [make_window("a", "pay", ["u", "Sure", "u"]), make_window("b", "ship", ["u", "Ok", "u"])]
        case = ConflictCase("w:0", "I have a problem", [("pay", 0.5), ("ship", 0.4)], ConflictMode.THRESHOLD)
        classifier = OracleBackend(score_fn=lambda prompt, labels: [1.0, 1.0])

        resolve(case, OracleBackend(generate_fn=broken), classifier, LabelSpace(["pay", "ship"]),
                BotResponseIndex(corpus), Turn(index=1, speaker=Speaker.BOT, text="x"))

        assert case.final == "pay"
        assert "generation_failed" in case.flags

    def test_case_validation(self):
        """Test candidates must be two distinct intents in descending order."""
        with pytest.raises(ValidationError):
            ConflictCase("w", "u", [("a", 0.5)], ConflictMode.THRESHOLD)
        with pytest.raises(ValidationError):
            ConflictCase("w", "u", [("a", 0.5), ("a", 0.4)], ConflictMode.THRESHOLD)
        with pytest.raises(ValidationError):
            ConflictCase("w", "u", [("a", 0.3), ("b", 0.4)], ConflictMode.THRESHOLD)


class TestErrorReduction:
    """Test the error-reduction metric."""

    @pytest.mark.parametrize("before,after,expected", [(100, 69, 0.31), (50, 50, 0.0), (10, 13, -0.3)])
    def test_values(self, before, after, expected):
        assert error_reduction(before, after) == pytest.approx(expected)

    def test_undefined_without_mistakes(self):
        with pytest.raises(UndefinedMetricError):
            error_reduction(0, 0)
