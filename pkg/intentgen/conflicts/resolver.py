#!/usr/bin/env python3
"""Counterfactual resolution of conflicting intents.

For a conflict between two candidate intents, each candidate gets a
counterfactual conversation: the logged first utterance, a bot response
borrowed from the candidate's training windows, and a generated third
utterance. Each conversation is classified and the candidate whose own
conversation scores its intent highest wins.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from ..backends.base import Seq2SeqBackend
from ..constants import ConflictMode, ResolutionRule, Speaker
from ..models.conflict import ConflictCase, ConflictReport, CounterfactualBranch
from ..models.dialogue import IntentWindow, Turn
from ..models.prediction import LabelScore
from ..models.task import LabelSpace
from ..tasks.formatting import gen3_prompt, intent_prompt, user_turn
from ..utils.errors import GenerationError, UndefinedMetricError, UsageError, ValidationError
from ..utils.logging import get_logger

logger = get_logger(__name__)

Candidates = List[Tuple[str, float]]


def _ranked(scores: Sequence[LabelScore]) -> List[LabelScore]:
    return sorted(scores, key=lambda s: -s.score)


def select_conflicts(predictions: Mapping[str, Sequence[LabelScore]],
                     gold: Optional[Mapping[str, str]],
                     mode: Union[str, ConflictMode],
                     threshold: float = 0.3) -> List[Tuple[str, Candidates]]:
    """
    Pick conflicting windows and their two candidate intents.

    Args:
        predictions: Label scores per window id
        gold: Gold label per window id (required by the oracle modes)
        mode: threshold, mistake_oracle or conflict_oracle
        threshold: Score bound for threshold mode, in (0, 1)

    Returns:
        (window_id, [(top1, a1), (top2, a2)]) in input order
    """
    mode = ConflictMode(mode) if not isinstance(mode, ConflictMode) else mode
    if mode is ConflictMode.THRESHOLD and not 0.0 < threshold < 1.0:
        raise UsageError(f"threshold {threshold} outside (0, 1)")
    if mode is not ConflictMode.THRESHOLD and gold is None:
        raise UsageError(f"{mode.value} needs gold labels")

    conflicts: List[Tuple[str, Candidates]] = []
    for window_id, scores in predictions.items():
        ranked = _ranked(scores)
        if len(ranked) < 2:
            continue
        top1, top2 = ranked[0], ranked[1]
        if mode is ConflictMode.THRESHOLD:
            selected = sum(1 for s in ranked if s.score > threshold) >= 2
        else:
            expected = gold.get(window_id)
            mistaken = expected is not None and top1.label != expected
            selected = mistaken and (mode is ConflictMode.MISTAKE_ORACLE or top2.label == expected)
        if selected:
            conflicts.append((window_id, [(top1.label, top1.score), (top2.label, top2.score)]))
    return conflicts


class BotResponseIndex:
    """Bot responses of labeled windows, grouped by intent."""

    def __init__(self, windows: Iterable[IntentWindow]):
        self.by_intent: Dict[str, List[Turn]] = {}
        self.global_frequency: Counter = Counter()
        self._first: Dict[str, Turn] = {}
        for window in windows:
            if window.intent is None:
                continue
            for turn in window.utterances:
                if turn.is_user:
                    continue
                self.by_intent.setdefault(window.intent, []).append(turn)
                self.global_frequency[turn.text] += 1
                self._first.setdefault(turn.text, turn)

    def _most_frequent(self, counter: Counter) -> Turn:
        text = min(counter, key=lambda t: (-counter[t], len(t), t))
        return self._first[text]

    def find(self, intent: str, gold_response: Turn) -> Tuple[Turn, bool]:
        """
        Best borrowed response for ``intent`` and whether a fallback was used.

        Maximizes slot-name overlap with the gold response; ties go to the
        shortest, then lexicographically first text. Without any response
        for the intent, the most frequent response overall is used.
        """
        candidates = self.by_intent.get(intent, [])
        if candidates:
            gold_slots = set(gold_response.slots or ())
            best = min(candidates, key=lambda t: (-len(set(t.slots or ()) & gold_slots), len(t.text), t.text))
            return best, False
        if not self.global_frequency:
            raise UsageError("no bot responses available to mimic")
        return self._most_frequent(self.global_frequency), True


def mimic_bot_response(intent: str, corpus: Iterable[IntentWindow], gold_response: Turn) -> Turn:
    """Bot response from ``corpus`` for ``intent`` with the most slots shared with ``gold_response``."""
    return BotResponseIndex(corpus).find(intent, gold_response)[0]


def _label_score(scores: Sequence[LabelScore], label: str) -> float:
    return next((s.score for s in scores if s.label == label), 0.0)


def resolve(case: ConflictCase, generator: Seq2SeqBackend, classifier: Seq2SeqBackend,
            labels: LabelSpace, responses: BotResponseIndex, gold_response: Turn,
            rule: Union[str, ResolutionRule] = ResolutionRule.MAX, seed: int = 0) -> ConflictCase:
    """
    Resolve one conflict counterfactually.

    Args:
        case: Conflict with its two prior candidates
        generator: Third-utterance generator
        classifier: Intent classifier
        labels: Label space
        responses: Bot responses to borrow from
        gold_response: The logged bot response (slot reference)
        rule: "max" (own-intent score per conversation) or "average"
        seed: Generation seed

    Returns:
        The case with branches and final intent filled in
    """
    rule = ResolutionRule(rule) if not isinstance(rule, ResolutionRule) else rule
    first = Turn(index=0, speaker=Speaker.USER, text=case.first_utterance)
    intents = case.intents
    branches: List[CounterfactualBranch] = []
    for position, intent in enumerate(intents):
        response, fallback = responses.find(intent, gold_response)
        if fallback:
            case.flags.append(f"response_fallback:{intent}")
            logger.warning(f"{case.window_id}: fallback bot response for '{intent}'")
        bot = Turn(index=1, speaker=response.speaker, text=response.text, slots=response.slots)
        try:
            third = generator.generate(gen3_prompt([first, bot]), 1, seed=seed).texts[0]
            conversation = [first, bot, user_turn(third, 2)]
        except (GenerationError, ValidationError) as e:
            logger.warning(f"{case.window_id}: generation failed ({e}); keeping prior top-1")
            case.flags.append("generation_failed")
            case.branches = branches
            case.final = case.prior_top
            return case
        scores = classifier.score_labels(intent_prompt(conversation), labels)
        other = intents[1 - position]
        branches.append(CounterfactualBranch(
            intent=intent,
            bot_response=bot.text,
            third_utterance=third,
            own_score=_label_score(scores, intent),
            other_score=_label_score(scores, other),
            response_fallback=fallback,
        ))

    case.branches = branches
    b1, b2 = branches[0].own_score, branches[0].other_score
    c1, c2 = branches[1].own_score, branches[1].other_score
    if rule is ResolutionRule.MAX:
        case.final = intents[1] if c1 > b1 else intents[0]
    else:
        first_mean, second_mean = (b1 + c2) / 2, (b2 + c1) / 2
        case.final = intents[1] if second_mean > first_mean else intents[0]
    return case


def error_reduction(before: int, after: int) -> float:
    """
    1 - after/before.

    Raises:
        UndefinedMetricError: when ``before`` is zero
    """
    if before <= 0:
        raise UndefinedMetricError("error reduction is undefined without prior mistakes")
    return 1.0 - after / before


@dataclass
class ConflictRun:
    """Report plus per-case audit records of one mode."""

    report: ConflictReport
    cases: List[ConflictCase]


def run_conflicts(windows: Sequence[IntentWindow], classifier: Seq2SeqBackend,
                  generator: Seq2SeqBackend, labels: LabelSpace,
                  corpus: Iterable[IntentWindow], mode: Union[str, ConflictMode],
                  threshold: float = 0.3, rule: Union[str, ResolutionRule] = ResolutionRule.MAX,
                  seed: int = 0) -> ConflictRun:
    """
    Detect and resolve conflicts on first-utterance predictions of ``windows``.

    Mistakes are counted over the selected conflicts, so each mode reports
    the share of its own mistakes it repairs. Resolving a conflict can fix a
    mistake (final becomes gold) or break a correct prediction.
    """
    mode = ConflictMode(mode) if not isinstance(mode, ConflictMode) else mode
    windows = list(windows)
    by_id = {w.window_id: w for w in windows}
    predictions = {
        w.window_id: classifier.score_labels(intent_prompt(w.head(1)), labels) for w in windows
    }
    gold = {w.window_id: w.intent for w in windows if w.intent is not None}
    responses = BotResponseIndex(corpus)
    cases: List[ConflictCase] = []
    fixed = broken = mistakes_before = 0
    for window_id, candidates in select_conflicts(predictions, gold, mode, threshold):
        window = by_id[window_id]
        case = ConflictCase(
            window_id=window_id,
            first_utterance=window.utterances[0].text,
            candidates=candidates,
            mode=mode,
            gold=window.intent,
        )
        resolve(case, generator, classifier, labels, responses, window.utterances[1], rule, seed)
        if case.gold is not None:
            if case.prior_top != case.gold:
                mistakes_before += 1
            if case.prior_top != case.gold and case.final == case.gold:
                fixed += 1
            elif case.prior_top == case.gold and case.final != case.gold:
                broken += 1
        cases.append(case)

    mistakes_after = mistakes_before - fixed + broken
    try:
        reduction: Optional[float] = error_reduction(mistakes_before, mistakes_after)
    except UndefinedMetricError:
        logger.warning(f"{mode.value}: no mistakes before resolution; error reduction undefined")
        reduction = None
    report = ConflictReport(
        mode=mode,
        conflicts_found=len(cases),
        mistakes_before=mistakes_before,
        mistakes_after=mistakes_after,
        error_reduction=reduction,
        fixed=fixed,
        broken=broken,
        cases_resolved=sum(1 for c in cases if "generation_failed" not in c.flags),
    )
    logger.info(f"Conflicts ({mode.value}): {len(cases)} found, {fixed} fixed, {broken} broken")
    return ConflictRun(report=report, cases=cases)
