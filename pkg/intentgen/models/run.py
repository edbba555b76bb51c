"""Run-level domain types: training logs, manifests and scenario results."""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Dict, List, Optional

from ..utils.errors import ValidationError


@dataclass
class EpochRecord:
    """Metrics for one training epoch."""

    epoch: int
    train_loss: float
    dev_loss: Optional[float] = None
    dev_accuracy: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epoch': self.epoch,
            'train_loss': self.train_loss,
            'dev_loss': self.dev_loss,
            'dev_accuracy': self.dev_accuracy,
        }


@dataclass
class TrainingLog:
    """Per-epoch history of one fine_tune call."""

    epochs: List[EpochRecord] = field(default_factory=list)
    stopped_early: bool = False
    best_epoch: Optional[int] = None

    def __len__(self) -> int:
        return len(self.epochs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'epochs': [e.to_dict() for e in self.epochs],
            'stopped_early': self.stopped_early,
            'best_epoch': self.best_epoch,
        }


@dataclass
class StageRecord:
    """One fine-tuning stage of a regime."""

    name: str
    sources: List[str]
    example_counts: Dict[str, int]
    fingerprint: str
    seed: int
    epochs_run: int = 0
    stopped_early: bool = False

    @property
    def total_examples(self) -> int:
        return sum(self.example_counts.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'sources': list(self.sources),
            'example_counts': dict(self.example_counts),
            'fingerprint': self.fingerprint,
            'seed': self.seed,
            'epochs_run': self.epochs_run,
            'stopped_early': self.stopped_early,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'StageRecord':
        return cls(
            name=data['name'],
            sources=list(data['sources']),
            example_counts=dict(data['example_counts']),
            fingerprint=data['fingerprint'],
            seed=int(data['seed']),
            epochs_run=int(data.get('epochs_run', 0)),
            stopped_early=bool(data.get('stopped_early', False)),
        )


@dataclass
class RunManifest:
    """Everything needed to replay a training run."""

    run_id: str
    regime: str
    config_hash: str
    seeds: Dict[str, int]
    dataset_fingerprints: Dict[str, str]
    stages: List[StageRecord] = field(default_factory=list)
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec='seconds')
    )
    reorder_ratio: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'run_id': self.run_id,
            'regime': self.regime,
            'config_hash': self.config_hash,
            'seeds': dict(self.seeds),
            'dataset_fingerprints': dict(self.dataset_fingerprints),
            'stages': [s.to_dict() for s in self.stages],
            'created_at': self.created_at,
            'reorder_ratio': self.reorder_ratio,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        return cls(
            run_id=data['run_id'],
            regime=data['regime'],
            config_hash=data['config_hash'],
            seeds={k: int(v) for k, v in data['seeds'].items()},
            dataset_fingerprints=dict(data['dataset_fingerprints']),
            stages=[StageRecord.from_dict(s) for s in data.get('stages', [])],
            created_at=data.get('created_at', ''),
            reorder_ratio=data.get('reorder_ratio'),
        )


@dataclass
class ScenarioResult:
    """Accuracy t/d of one model under one scenario."""

    model: str
    scenario: str
    t: int
    d: int
    generator: Optional[str] = None
    delta_vs_baseline: Optional[float] = None

    def __post_init__(self):
        if self.d <= 0 or not 0 <= self.t <= self.d:
            raise ValidationError(f"invalid counts t={self.t}, d={self.d}")

    @property
    def accuracy(self) -> float:
        return self.t / self.d

    @property
    def exact_accuracy(self) -> Fraction:
        return Fraction(self.t, self.d)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'model': self.model,
            'scenario': self.scenario,
            'generator': self.generator,
            't': self.t,
            'd': self.d,
            'accuracy': self.accuracy,
            'delta_vs_baseline': self.delta_vs_baseline,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ScenarioResult':
        return cls(
            model=data['model'],
            scenario=data['scenario'],
            t=int(data['t']),
            d=int(data['d']),
            generator=data.get('generator'),
            delta_vs_baseline=data.get('delta_vs_baseline'),
        )
