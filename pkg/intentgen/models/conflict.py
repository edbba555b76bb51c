"""Conflicting-intent domain types."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..constants import ConflictMode
from ..utils.errors import ValidationError


@dataclass
class CounterfactualBranch:
    """One candidate intent's look-ahead conversation."""

    intent: str
    bot_response: str
    third_utterance: Optional[str] = None
    own_score: float = 0.0
    other_score: float = 0.0
    response_fallback: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            'intent': self.intent,
            'bot_response': self.bot_response,
            'third_utterance': self.third_utterance,
            'own_score': self.own_score,
            'other_score': self.other_score,
            'response_fallback': self.response_fallback,
        }


@dataclass
class ConflictCase:
    """A conflicting-intent instance and its resolution.

    ``candidates`` holds the two prior (intent, score) pairs, a1 >= a2.
    ``branches[0]`` is the first candidate's counterfactual conversation,
    whose own/other scores are b1/b2; ``branches[1]`` gives c1/c2.
    """

    window_id: str
    first_utterance: str
    candidates: List[Tuple[str, float]]
    mode: ConflictMode
    gold: Optional[str] = None
    branches: List[CounterfactualBranch] = field(default_factory=list)
    final: Optional[str] = None
    flags: List[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.candidates) != 2:
            raise ValidationError(f"{self.window_id}: expected 2 candidates")
        (first, a1), (second, a2) = self.candidates
        if first == second:
            raise ValidationError(f"{self.window_id}: candidates must be distinct intents")
        if a1 < a2:
            raise ValidationError(f"{self.window_id}: prior scores must be descending")

    @property
    def prior_top(self) -> str:
        return self.candidates[0][0]

    @property
    def intents(self) -> List[str]:
        return [label for label, _ in self.candidates]

    def scores(self) -> Dict[str, Optional[float]]:
        """The six audit scores a1, a2, b1, b2, c1, c2."""
        data: Dict[str, Optional[float]] = {
            'a1': self.candidates[0][1],
            'a2': self.candidates[1][1],
            'b1': None, 'b2': None, 'c1': None, 'c2': None,
        }
        if len(self.branches) == 2:
            data.update({
                'b1': self.branches[0].own_score, 'b2': self.branches[0].other_score,
                'c1': self.branches[1].own_score, 'c2': self.branches[1].other_score,
            })
        return data

    def to_dict(self) -> Dict[str, Any]:
        """Full per-case audit record."""
        return {
            'window_id': self.window_id,
            'first_utterance': self.first_utterance,
            'candidates': [list(c) for c in self.candidates],
            'mode': self.mode.value,
            'gold': self.gold,
            'branches': [b.to_dict() for b in self.branches],
            'scores': self.scores(),
            'final': self.final,
            'flags': list(self.flags),
        }


@dataclass
class ConflictReport:
    """Error reduction achieved by counterfactual resolution."""

    mode: ConflictMode
    conflicts_found: int
    mistakes_before: int
    mistakes_after: int
    error_reduction: Optional[float]
    fixed: int = 0
    broken: int = 0
    cases_resolved: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode.value,
            'conflicts_found': self.conflicts_found,
            'mistakes_before': self.mistakes_before,
            'mistakes_after': self.mistakes_after,
            'error_reduction': self.error_reduction,
            'fixed': self.fixed,
            'broken': self.broken,
            'cases_resolved': self.cases_resolved,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConflictReport':
        return cls(
            mode=ConflictMode(data['mode']),
            conflicts_found=int(data['conflicts_found']),
            mistakes_before=int(data['mistakes_before']),
            mistakes_after=int(data['mistakes_after']),
            error_reduction=data.get('error_reduction'),
            fixed=int(data.get('fixed', 0)),
            broken=int(data.get('broken', 0)),
            cases_resolved=int(data.get('cases_resolved', 0)),
        )
