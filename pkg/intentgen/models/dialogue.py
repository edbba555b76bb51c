"""Dialogue-level domain types."""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from ..constants import DialogueSource, MIN_WINDOW_LENGTH, Speaker, SplitName
from ..utils.errors import ValidationError


def normalize_whitespace(text: str) -> str:
    """Collapse runs of whitespace to single spaces and strip."""
    return " ".join(text.split())


@dataclass(frozen=True)
class Turn:
    """One utterance of a dialogue."""

    index: int
    speaker: Speaker
    text: str
    slots: Optional[Tuple[str, ...]] = None
    intent: Optional[str] = None

    def __post_init__(self):
        text = normalize_whitespace(self.text or "")
        if not text:
            raise ValidationError(f"turn {self.index}: empty utterance")
        object.__setattr__(self, 'text', text)
        if self.slots is not None:
            slots = tuple(self.slots)
            if len(set(slots)) != len(slots):
                raise ValidationError(f"turn {self.index}: duplicate slot names {slots}")
            object.__setattr__(self, 'slots', slots)

    @property
    def is_user(self) -> bool:
        return self.speaker is Speaker.USER

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        data: Dict[str, Any] = {
            'index': self.index,
            'speaker': self.speaker.value,
            'text': self.text,
        }
        if self.slots is not None:
            data['slots'] = list(self.slots)
        if self.intent is not None:
            data['intent'] = self.intent
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Turn':
        """Create Turn from a canonical record."""
        slots = data.get('slots')
        return cls(
            index=int(data['index']),
            speaker=Speaker(data['speaker']),
            text=data['text'],
            slots=tuple(slots) if slots is not None else None,
            intent=data.get('intent'),
        )


@dataclass(frozen=True)
class Dialogue:
    """A canonical user-bot conversation."""

    id: str
    domain: str
    turns: Tuple[Turn, ...]
    source: DialogueSource
    escalated: Optional[bool] = None

    @property
    def is_alternating(self) -> bool:
        """True when no two consecutive turns share a speaker."""
        return all(a.speaker is not b.speaker for a, b in zip(self.turns, self.turns[1:]))

    @property
    def intents(self) -> List[str]:
        """Distinct intents of the user turns, in order of first appearance."""
        seen: List[str] = []
        for turn in self.turns:
            if turn.intent is not None and turn.intent not in seen:
                seen.append(turn.intent)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a canonical record."""
        data: Dict[str, Any] = {
            'id': self.id,
            'domain': self.domain,
            'source': self.source.value,
            'turns': [t.to_dict() for t in self.turns],
        }
        if self.escalated is not None:
            data['escalated'] = self.escalated
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Dialogue':
        """Create Dialogue from a canonical record."""
        return cls(
            id=str(data['id']),
            domain=data.get('domain', ''),
            turns=tuple(Turn.from_dict(t) for t in data['turns']),
            source=DialogueSource(data.get('source', DialogueSource.SYNTHETIC.value)),
            escalated=data.get('escalated'),
        )


@dataclass(frozen=True)
class IntentWindow:
    """A user-initiated, speaker-alternating slice pertaining to one intent."""

    dialogue_id: str
    intent: Optional[str]
    utterances: Tuple[Turn, ...]
    split: SplitName = SplitName.UNSUPERVISED
    start: int = 0

    def __post_init__(self):
        utterances = tuple(self.utterances)
        object.__setattr__(self, 'utterances', utterances)
        if len(utterances) < MIN_WINDOW_LENGTH:
            raise ValidationError(
                f"window {self.dialogue_id}:{self.start} has {len(utterances)} utterances"
            )
        if not utterances[0].is_user:
            raise ValidationError(f"window {self.dialogue_id}:{self.start} starts with a bot turn")
        for a, b in zip(utterances, utterances[1:]):
            if a.speaker is b.speaker:
                raise ValidationError(
                    f"window {self.dialogue_id}:{self.start} does not alternate speakers"
                )

    @property
    def window_id(self) -> str:
        """Identifier unique within a corpus."""
        return f"{self.dialogue_id}:{self.start}"

    @property
    def texts(self) -> List[str]:
        return [u.text for u in self.utterances]

    def head(self, k: int) -> Tuple[Turn, ...]:
        """First k utterances."""
        return self.utterances[:k]

    def with_split(self, split: SplitName) -> 'IntentWindow':
        return replace(self, split=split)

    def with_intent(self, intent: Optional[str]) -> 'IntentWindow':
        """Copy with the label replaced (None erases it) on the window and its user turns."""
        utterances = tuple(
            replace(u, intent=intent) if u.is_user else u for u in self.utterances
        )
        return replace(self, intent=intent, utterances=utterances)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            'dialogue_id': self.dialogue_id,
            'start': self.start,
            'intent': self.intent,
            'split': self.split.value,
            'utterances': [u.to_dict() for u in self.utterances],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'IntentWindow':
        """Create IntentWindow from a record."""
        return cls(
            dialogue_id=str(data['dialogue_id']),
            intent=data.get('intent'),
            utterances=tuple(Turn.from_dict(u) for u in data['utterances']),
            split=SplitName(data.get('split', SplitName.UNSUPERVISED.value)),
            start=int(data.get('start', 0)),
        )


@dataclass
class CorpusSplits:
    """Windows assigned to the unsupervised/supervised/weak/dev/test splits."""

    name: str
    intents: List[str]
    windows: Dict[SplitName, List[IntentWindow]] = field(default_factory=dict)

    def get(self, split: SplitName) -> List[IntentWindow]:
        return self.windows.get(split, [])

    def has(self, split: SplitName) -> bool:
        return split in self.windows

    @property
    def counts(self) -> Dict[str, int]:
        """Per-split sizes."""
        return {split.value: len(self.windows.get(split, [])) for split in SplitName}

    def dialogue_ids(self, split: SplitName) -> List[str]:
        return [w.dialogue_id for w in self.get(split)]

    def with_split(self, split: SplitName, windows: List[IntentWindow]) -> 'CorpusSplits':
        """Copy with one split replaced."""
        updated = dict(self.windows)
        updated[split] = [w.with_split(split) for w in windows]
        return CorpusSplits(name=self.name, intents=list(self.intents), windows=updated)
