"""Task-level domain types."""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional

from ..constants import TASK_PREFIXES, TaskName
from ..utils.errors import ValidationError


@dataclass(frozen=True)
class TaskExample:
    """One text-in/text-out training record."""

    task: TaskName
    input_text: str
    target_text: str
    origin: str
    split: str = ""
    meta: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        prefix = TASK_PREFIXES[self.task]
        if not self.input_text.startswith(prefix):
            raise ValidationError(f"{self.task.value} input must start with '{prefix}'")
        if not self.target_text:
            raise ValidationError(f"{self.task.value} example from {self.origin} has empty target")

    @property
    def key(self) -> str:
        """Content key used for fingerprints."""
        return f"{self.task.value}\t{self.origin}\t{self.input_text}\t{self.target_text}"

    def to_dict(self) -> Dict[str, Any]:
        """Convert to the on-disk record (task, input, target, origin)."""
        data: Dict[str, Any] = {
            'task': self.task.value,
            'input': self.input_text,
            'target': self.target_text,
            'origin': self.origin,
            'split': self.split,
        }
        if self.meta:
            data['meta'] = dict(self.meta)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TaskExample':
        """Create TaskExample from a record."""
        return cls(
            task=TaskName(data['task']),
            input_text=data['input'],
            target_text=data['target'],
            origin=data['origin'],
            split=data.get('split', ''),
            meta=dict(data.get('meta') or {}),
        )


@dataclass(frozen=True)
class MixtureSpec:
    """How unsupervised data is divided between reordering and 3UG, plus other tasks."""

    reorder_ratio: float = 0.1
    tasks: FrozenSet[TaskName] = frozenset({TaskName.GEN3, TaskName.REORDER})
    counts: Dict[str, int] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if not 0.0 <= self.reorder_ratio <= 1.0:
            raise ValidationError(f"reorder ratio {self.reorder_ratio} outside [0, 1]")
        object.__setattr__(self, 'tasks', frozenset(self.tasks))

    @property
    def unsupervised_budget(self) -> Optional[int]:
        return self.counts.get('unsupervised')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'reorder_ratio': self.reorder_ratio,
            'tasks': sorted(t.value for t in self.tasks),
            'counts': dict(self.counts),
        }


def verbalize_label(label: str) -> str:
    """Lowercase label with underscores replaced by spaces."""
    return " ".join(label.replace("_", " ").lower().split())


class LabelSpace:
    """Ordered intent labels with an invertible verbalizer."""

    def __init__(self, labels: Iterable[str]):
        """
        Initialize label space.

        Args:
            labels: Intent labels; order defines the tie-break index

        Raises:
            ValidationError: if labels repeat or two labels verbalize identically
        """
        self.labels: List[str] = list(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("duplicate labels in label space")
        self._encode = {label: verbalize_label(label) for label in self.labels}
        self._decode = {text: label for label, text in self._encode.items()}
        if len(self._decode) != len(self.labels):
            raise ValidationError("verbalizer is not invertible for this label set")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._encode

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def encode(self, label: str) -> str:
        """Verbalized target string for a label."""
        return self._encode[label]

    def decode(self, text: str) -> Optional[str]:
        """Label for a generated string, or None when it matches no verbalization."""
        return self._decode.get(verbalize_label(text))

    @property
    def targets(self) -> List[str]:
        return [self._encode[label] for label in self.labels]

    def to_dict(self) -> Dict[str, Any]:
        return {'labels': list(self.labels)}

    def __repr__(self) -> str:
        return f"LabelSpace({len(self.labels)} labels)"
