#!/usr/bin/env python3
"""Training regimes and their staged fine-tuning schedules."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..backends.base import BackendConfig, Seq2SeqBackend
from ..constants import ABLATION_ALL, ScenarioKind, SplitName, TaskName, RegimeName
from ..corpus.splits import splits_fingerprint
from ..inference.scenarios import ScenarioSpec, evaluate
from ..models.dialogue import CorpusSplits, Dialogue
from ..models.run import RunManifest, ScenarioResult, StageRecord
from ..models.task import LabelSpace, MixtureSpec, TaskExample
from ..tasks.builders import (
    build_3ug_examples,
    build_escalation_examples,
    build_intent_examples,
    build_reorder_examples,
    build_repetition_examples,
)
from ..tasks.mixture import build_mixture, task_counts
from ..utils.errors import ConfigurationError, TaskNotApplicableError, UsageError
from ..utils.io import config_hash, fingerprint, write_jsonl
from ..utils.logging import get_logger
from ..utils.seeding import derive_seed

logger = get_logger(__name__)

# Example sources a stage can draw from
SUPERVISED_INTENT = "intent_supervised"
WEAK_INTENT = "intent_weak"
UNSUPERVISED_MIXTURE = "unsupervised_mixture"
AUX_SOURCES = {TaskName.ESCALATION: "escalation", TaskName.REPETITION: "repetition"}


@dataclass(frozen=True)
class StageSpec:
    """One fine_tune call: its example sources and optional config overrides."""

    name: str
    sources: Tuple[str, ...]
    config: Optional[BackendConfig] = None


@dataclass(frozen=True)
class RegimeSpec:
    """A named regime: ordered stages over a shared mixture."""

    name: RegimeName
    stages: Tuple[StageSpec, ...]
    mixture: MixtureSpec = field(default_factory=MixtureSpec)
    intent_k: int = 3
    repetition_threshold: float = 0.85

    @property
    def k(self) -> int:
        """Context length of the intent examples (SUC uses one utterance)."""
        return 1 if self.name is RegimeName.SUC else self.intent_k

    @property
    def uses_unsupervised(self) -> bool:
        return any(UNSUPERVISED_MIXTURE in stage.sources for stage in self.stages)

    def with_ratio(self, ratio: float) -> 'RegimeSpec':
        return replace(self, mixture=replace(self.mixture, reorder_ratio=ratio))

    def to_dict(self) -> Dict[str, object]:
        return {
            'name': self.name.value,
            'stages': [{'name': s.name, 'sources': list(s.sources)} for s in self.stages],
            'mixture': self.mixture.to_dict(),
            'intent_k': self.k,
            'repetition_threshold': self.repetition_threshold,
        }


def build_regime(name: Union[str, RegimeName], mixture: Optional[MixtureSpec] = None,
                 intent_k: int = 3, weak_in_second_stage: bool = True,
                 repetition_threshold: float = 0.85) -> RegimeSpec:
    """
    Assemble the stage layout of a named regime.

    SUC and SDC train once on intent examples (k=1 and k=intent_k). ALL
    trains once on everything. PART_SDC trains on the unsupervised mixture
    and auxiliary tasks, then on labeled intent examples. ALL_SDC trains on
    everything, then again on labeled intent examples.
    """
    regime = name if isinstance(name, RegimeName) else RegimeName(name)
    mixture = mixture or MixtureSpec()
    aux = tuple(source for task, source in AUX_SOURCES.items() if task in mixture.tasks)
    labeled = (SUPERVISED_INTENT, WEAK_INTENT)
    second = labeled if weak_in_second_stage else (SUPERVISED_INTENT,)
    everything = labeled + (UNSUPERVISED_MIXTURE,) + aux

    if regime in (RegimeName.SUC, RegimeName.SDC):
        stages = (StageSpec("main", labeled),)
    elif regime is RegimeName.ALL:
        stages = (StageSpec("main", everything),)
    elif regime is RegimeName.PART_SDC:
        stages = (StageSpec("stage1", (UNSUPERVISED_MIXTURE,) + aux), StageSpec("stage2", second))
    else:
        stages = (StageSpec("stage1", everything), StageSpec("stage2", second))
    return RegimeSpec(regime, stages, mixture, intent_k, repetition_threshold)


class ExampleSources:
    """Lazily built, cached example pools for one corpus and root seed."""

    def __init__(self, spec: RegimeSpec, splits: CorpusSplits, seed: int,
                 dialogues: Optional[Sequence[Dialogue]] = None):
        self.spec = spec
        self.splits = splits
        self.seed = seed
        self.dialogues = list(dialogues or [])
        self._cache: Dict[str, List[TaskExample]] = {}

    def _require(self, split: SplitName, stage: str) -> None:
        if not self.splits.has(split):
            raise ConfigurationError(f"stage '{stage}' of {self.spec.name.value} needs the {split.value} split")

    def get(self, source: str, stage: str) -> List[TaskExample]:
        if source not in self._cache:
            self._cache[source] = self._build(source, stage)
        return self._cache[source]

    def _build(self, source: str, stage: str) -> List[TaskExample]:
        if source == SUPERVISED_INTENT:
            self._require(SplitName.SUPERVISED, stage)
            return build_intent_examples(self.splits.get(SplitName.SUPERVISED), self.spec.k)
        if source == WEAK_INTENT:
            # Optional: absent weak split contributes nothing
            return build_intent_examples(self.splits.get(SplitName.WEAK), self.spec.k)
        if source == UNSUPERVISED_MIXTURE:
            self._require(SplitName.UNSUPERVISED, stage)
            unsupervised = self.splits.get(SplitName.UNSUPERVISED)
            pools = {
                TaskName.GEN3: build_3ug_examples(unsupervised),
                TaskName.REORDER: build_reorder_examples(unsupervised, derive_seed(self.seed, "tasks.reorder")),
            }
            mixture = replace(self.spec.mixture,
                              tasks=self.spec.mixture.tasks & {TaskName.GEN3, TaskName.REORDER})
            return build_mixture(mixture, pools, derive_seed(self.seed, "tasks.mixture"))
        if source == AUX_SOURCES[TaskName.ESCALATION]:
            if not self.dialogues:
                raise ConfigurationError(f"stage '{stage}' needs dialogues for the escalation task")
            try:
                return build_escalation_examples(self.dialogues)
            except TaskNotApplicableError as e:
                logger.warning(f"Skipping escalation task: {e}")
                return []
        if source == AUX_SOURCES[TaskName.REPETITION]:
            if not self.dialogues:
                raise ConfigurationError(f"stage '{stage}' needs dialogues for the repetition task")
            return build_repetition_examples(self.dialogues, self.spec.repetition_threshold)
        raise UsageError(f"unknown example source '{source}'")

    def stage_examples(self, stage: StageSpec) -> List[TaskExample]:
        examples: List[TaskExample] = []
        for source in stage.sources:
            examples.extend(self.get(source, stage.name))
        return examples

    def dev_examples(self, stage: StageSpec) -> List[TaskExample]:
        """Model-selection examples: intent examples for intent-bearing stages, else 3UG."""
        if not self.splits.has(SplitName.DEV):
            return []
        dev = self.splits.get(SplitName.DEV)
        if SUPERVISED_INTENT in stage.sources or WEAK_INTENT in stage.sources:
            return build_intent_examples(dev, self.spec.k)
        return build_3ug_examples(dev)


def build_stage_examples(spec: RegimeSpec, splits: CorpusSplits, seed: int,
                         dialogues: Optional[Sequence[Dialogue]] = None) -> Dict[str, List[TaskExample]]:
    """Per-stage training examples of a regime (pure; used for runs and replays)."""
    sources = ExampleSources(spec, splits, seed, dialogues)
    return {stage.name: sources.stage_examples(stage) for stage in spec.stages}


def run_regime(spec: RegimeSpec, splits: CorpusSplits, backend: Seq2SeqBackend, seed: int,
               dialogues: Optional[Sequence[Dialogue]] = None,
               examples_dir: Optional[Union[str, Path]] = None) -> Tuple[Seq2SeqBackend, RunManifest]:
    """
    Execute a regime's stages in order, one fine_tune call each.

    Args:
        spec: Regime layout
        splits: Corpus splits (the weak split is optional)
        backend: Backend to train in place
        seed: Root seed
        dialogues: Dialogues for the auxiliary tasks
        examples_dir: When given, each stage's examples are written there

    Returns:
        The trained backend and its RunManifest

    Raises:
        ConfigurationError: if a stage needs a missing split
    """
    sources = ExampleSources(spec, splits, seed, dialogues)
    manifest = RunManifest(
        run_id=f"{spec.name.value.lower()}-{config_hash(spec.to_dict())[:8]}",
        regime=spec.name.value,
        config_hash=config_hash({'regime': spec.to_dict(), 'backend': backend.config.model_dump(mode='json')}),
        seeds={'root': seed,
               'tasks.reorder': derive_seed(seed, "tasks.reorder"),
               'tasks.mixture': derive_seed(seed, "tasks.mixture")},
        dataset_fingerprints={'splits': splits_fingerprint(splits)},
        reorder_ratio=spec.mixture.reorder_ratio if spec.uses_unsupervised else None,
    )

    for stage in spec.stages:
        examples = sources.stage_examples(stage)
        if not examples:
            raise ConfigurationError(f"stage '{stage.name}' of {spec.name.value} has no examples")
        stage_seed = derive_seed(seed, f"train.{spec.name.value}.{stage.name}")
        config = (stage.config or backend.config).model_copy(update={'seed': stage_seed})
        stage_fingerprint = fingerprint(e.key for e in examples)

        logger.info(f"{spec.name.value}/{stage.name}: {len(examples)} examples {task_counts(examples)}")
        log = backend.fine_tune(examples, config, sources.dev_examples(stage))

        if examples_dir is not None:
            write_jsonl(Path(examples_dir) / f"{spec.name.value}.{stage.name}.jsonl",
                        (e.to_dict() for e in examples))
        manifest.seeds[f"train.{stage.name}"] = stage_seed
        manifest.dataset_fingerprints[f"examples.{stage.name}"] = stage_fingerprint
        manifest.stages.append(StageRecord(
            name=stage.name,
            sources=list(stage.sources),
            example_counts=task_counts(examples),
            fingerprint=stage_fingerprint,
            seed=stage_seed,
            epochs_run=len(log),
            stopped_early=log.stopped_early,
        ))
    return backend, manifest


def replay_manifest(manifest: RunManifest, spec: RegimeSpec, splits: CorpusSplits,
                    dialogues: Optional[Sequence[Dialogue]] = None) -> bool:
    """True when rebuilding the stages reproduces the recorded example fingerprints."""
    rebuilt = build_stage_examples(spec, splits, manifest.seeds['root'], dialogues)
    return all(
        fingerprint(e.key for e in rebuilt.get(stage.name, [])) == stage.fingerprint
        for stage in manifest.stages
    )


def sweep_ratio(base: RegimeSpec, ratios: Sequence[float], splits: CorpusSplits,
                backend_factory: Callable[[], Seq2SeqBackend], seed: int,
                dialogues: Optional[Sequence[Dialogue]] = None,
                max_workers: int = 1) -> List[Tuple[float, float]]:
    """
    Train one model per reordering ratio and score it on dev under 3-u.

    Args:
        base: Regime with an unsupervised stage
        ratios: Reordering ratios to try
        splits: Corpus splits with a dev split
        backend_factory: Creates a fresh backend per run
        seed: Root seed shared by all runs
        dialogues: Dialogues for the auxiliary tasks
        max_workers: Parallel runs (each on its own backend instance)

    Returns:
        (ratio, dev 3-u accuracy) pairs in input order
    """
    if not base.uses_unsupervised:
        raise ConfigurationError(f"{base.name.value} has no unsupervised stage to sweep")
    if not splits.has(SplitName.DEV) or not splits.get(SplitName.DEV):
        raise ConfigurationError("ratio sweep needs a non-empty dev split")
    labels = LabelSpace(splits.intents)

    def one(ratio: float) -> Tuple[float, float]:
        backend, _ = run_regime(base.with_ratio(ratio), splits, backend_factory(), seed, dialogues)
        evaluation = evaluate(splits.get(SplitName.DEV), [ScenarioSpec(ScenarioKind.U3)],
                              backend, labels, model=f"r={ratio}")
        accuracy = evaluation.results[0].accuracy
        logger.info(f"Sweep ratio {ratio}: dev 3-u accuracy {accuracy:.4f}")
        return ratio, accuracy

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, ratios))
    return [one(r) for r in ratios]


ABLATION_TASKS = (TaskName.GEN3, TaskName.REORDER, TaskName.ESCALATION, TaskName.REPETITION)


def with_tasks(spec: RegimeSpec, tasks: Sequence[TaskName]) -> RegimeSpec:
    """Rebuild a regime so its unsupervised and auxiliary stages use only ``tasks``."""
    weak_in_second_stage = len(spec.stages) < 2 or WEAK_INTENT in spec.stages[-1].sources
    mixture = replace(spec.mixture, tasks=frozenset(tasks))
    return build_regime(spec.name, mixture, spec.intent_k, weak_in_second_stage, spec.repetition_threshold)


def ablate_tasks(base: RegimeSpec, tasks: Sequence[TaskName], splits: CorpusSplits,
                 backend_factory: Callable[[], Seq2SeqBackend], seed: int,
                 dialogues: Optional[Sequence[Dialogue]] = None,
                 max_workers: int = 1) -> List[ScenarioResult]:
    """
    Auxiliary-task importance: one model per task alone, plus one with all of them.

    Every variant keeps the labeled intent examples of ``base``; only the
    auxiliary tasks change. Each model is scored on the test split under 3-u
    and recorded with the task name (or ``all``) as its model name.

    Raises:
        ConfigurationError: on a non-auxiliary or repeated task, or an empty test split
    """
    tasks = list(tasks)
    if not base.uses_unsupervised:
        raise ConfigurationError(f"{base.name.value} has no auxiliary stage to ablate")
    unknown = [t.value for t in tasks if t not in ABLATION_TASKS]
    if unknown:
        raise ConfigurationError(f"not auxiliary tasks: {', '.join(unknown)}")
    if not tasks or len(set(tasks)) != len(tasks):
        raise ConfigurationError("ablation needs distinct auxiliary tasks")
    if not splits.has(SplitName.TEST) or not splits.get(SplitName.TEST):
        raise ConfigurationError("task ablation needs a non-empty test split")
    labels = LabelSpace(splits.intents)
    variants = [(task.value, (task,)) for task in tasks] + [(ABLATION_ALL, tuple(tasks))]

    def one(variant: Tuple[str, Tuple[TaskName, ...]]) -> ScenarioResult:
        name, enabled = variant
        backend, _ = run_regime(with_tasks(base, enabled), splits, backend_factory(), seed, dialogues)
        evaluation = evaluate(splits.get(SplitName.TEST), [ScenarioSpec(ScenarioKind.U3)],
                              backend, labels, model=name)
        result = evaluation.results[0]
        logger.info(f"Ablation {name}: test 3-u accuracy {result.accuracy:.4f}")
        return result

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, variants))
    return [one(v) for v in variants]
