"""Prediction-level domain types."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class LabelScore:
    """A label with its normalized score."""

    label: str
    score: float

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'score': self.score}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LabelScore':
        return cls(label=data['label'], score=float(data['score']))


@dataclass
class GenerationResult:
    """Generated texts with their length-normalized log-likelihoods."""

    texts: List[str]
    scores: List[float]

    def to_dict(self) -> Dict[str, Any]:
        return {'texts': list(self.texts), 'scores': list(self.scores)}


@dataclass
class Prediction:
    """A predicted intent."""

    label: str
    score: float
    raw_text: Optional[str] = None
    votes: Optional[List[str]] = None
    vote_scores: Optional[List[float]] = None
    generated_thirds: Optional[List[str]] = None
    scores: List[LabelScore] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to an audit record."""
        data: Dict[str, Any] = {'label': self.label, 'score': self.score}
        if self.raw_text is not None:
            data['raw_text'] = self.raw_text
        if self.votes is not None:
            data['votes'] = list(self.votes)
            data['vote_scores'] = list(self.vote_scores or [])
        if self.generated_thirds is not None:
            data['generated_thirds'] = list(self.generated_thirds)
        return data
