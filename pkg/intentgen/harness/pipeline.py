#!/usr/bin/env python3
"""End-to-end pipeline: prep, build-tasks, weaklabel, train, sweep, eval, ablation, conflicts, report.

Each stage reads its inputs from and writes its outputs to the run
directory, so the CLI verbs and ``run_pipeline`` share one implementation
and an interrupted run resumes at the first unfinished stage.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..backends import BackendManager, Seq2SeqBackend
from ..config import init_config
from ..conflicts import run_conflicts
from ..constants import PUBLISHED_SHAPES, RegimeName, ScenarioKind, SplitName, TaskName
from ..corpus import (
    extract_intent_windows,
    ingest,
    load_splits,
    make_splits,
    read_splits_meta,
    save_splits,
    serialize_dialogues,
    synth_edu,
    truncate_windows,
)
from ..inference import ScenarioSpec, apply_baseline, evaluate
from ..models.conflict import ConflictReport
from ..models.dialogue import CorpusSplits, Dialogue
from ..models.run import RunManifest, ScenarioResult
from ..models.task import LabelSpace, MixtureSpec, TaskExample
from ..settings import PipelineSettings, load_settings, save_settings
from ..tasks import (
    build_3ug_examples,
    build_escalation_examples,
    build_intent_examples,
    build_mixture,
    build_reorder_examples,
    build_repetition_examples,
    task_counts,
)
from ..training.regimes import (
    ABLATION_TASKS,
    AUX_SOURCES,
    UNSUPERVISED_MIXTURE,
    RegimeSpec,
    ablate_tasks,
    build_regime,
    run_regime,
    sweep_ratio,
)
from ..utils.errors import ConfigurationError, StageError, TaskNotApplicableError
from ..utils.io import read_jsonl, write_json, write_jsonl
from ..utils.logging import get_logger, run_log
from ..utils.seeding import derive_seed
from ..weak import parse_classifier_spec, weak_label
from .reports import (
    MAIN_SCENARIOS,
    accuracy_grid,
    baseline_accuracy,
    plot_sweep,
    read_results,
    report_ablation_table,
    report_conflict_table,
    report_lookahead_table,
    report_main_table,
    write_results,
    write_sweep,
)
from .run_dir import ERROR_FILE, RunDirectory

logger = get_logger(__name__)

STAGES = ("prep", "build-tasks", "weaklabel", "train", "sweep", "eval", "ablation", "conflicts", "report")
DIALOGUES_FILE = "dialogues.jsonl"
TASKS_FILE = "tasks.jsonl"
WEAK_REPORT_FILE = "weak_label.json"
RESULTS_FILE = "results.jsonl"
CONFLICTS_FILE = "conflicts.jsonl"
ABLATION_FILE = "ablation.jsonl"
ABLATION_TABLE = "ablation_table.md"
_META_BASE_KEYS = ('name', 'intents', 'counts', 'fingerprint')


# ---------- settings helpers ----------

def mixture_from_settings(settings: PipelineSettings) -> MixtureSpec:
    tasks = settings.tasks
    counts = {'unsupervised': tasks.unsupervised_budget} if tasks.unsupervised_budget is not None else {}
    return MixtureSpec(reorder_ratio=tasks.reorder_ratio, tasks=frozenset(tasks.task_names), counts=counts)


def regime_from_settings(settings: PipelineSettings, regime: str) -> RegimeSpec:
    return build_regime(
        regime,
        mixture=mixture_from_settings(settings),
        intent_k=settings.tasks.intent_k,
        weak_in_second_stage=settings.training.weak_in_second_stage,
        repetition_threshold=settings.tasks.repetition_threshold,
    )


def _needs_dialogues(spec: RegimeSpec) -> bool:
    aux = set(AUX_SOURCES.values())
    return any(aux & set(stage.sources) for stage in spec.stages)


def load_dialogues(splits_dir: Union[str, Path]) -> List[Dialogue]:
    """Training-side dialogues written by prep (empty when absent)."""
    path = Path(splits_dir) / DIALOGUES_FILE
    if not path.exists():
        return []
    return ingest(path, "canonical")


# ---------- prep ----------

def load_corpus(settings: PipelineSettings) -> List[Dialogue]:
    """Ingest the configured corpus, or synthesize one."""
    corpus = settings.corpus
    if corpus.format == "synthetic":
        return synth_edu(corpus.synthetic_intents, corpus.synthetic_windows,
                         derive_seed(settings.seed, "corpus.synthetic"))
    if not corpus.path:
        raise ConfigurationError(f"corpus.path is required for format '{corpus.format}'")
    return ingest(corpus.path, corpus.format, corpus.label_field)


def prep_corpus(settings: PipelineSettings, out_dir: Union[str, Path],
                dialogues: Optional[Sequence[Dialogue]] = None) -> Dict[str, Any]:
    """
    Extract windows, split them and write the splits directory.

    Besides the split files this writes ``dialogues.jsonl`` (dialogues of
    the unsupervised and supervised splits, input to the auxiliary tasks)
    and a prep report in ``splits.meta``.

    Returns:
        The meta record
    """
    corpus = settings.corpus
    dialogues = list(dialogues) if dialogues is not None else load_corpus(settings)
    windows = extract_intent_windows(dialogues)
    pool = len(windows)
    if corpus.max_window_length is not None:
        windows = truncate_windows(windows, corpus.max_window_length)

    split_seed = derive_seed(settings.seed, "splits")
    splits = make_splits(windows, corpus.sizes, split_seed, name=corpus.name)

    report: Dict[str, Any] = {
        'source': corpus.format,
        'label_field': corpus.label_field,
        'dialogues': len(dialogues),
        'pool': pool,
        'intent_count': len(splits.intents),
        'seed': split_seed,
    }
    published = PUBLISHED_SHAPES.get(corpus.name)
    if published:
        report['published_pool'] = published['pool']
        report['pool_deviation'] = pool - published['pool']
        report['published_intents'] = published['intents']
        if pool != published['pool']:
            logger.warning(f"{corpus.name}: extracted {pool} windows, published pool is {published['pool']}")

    out_dir = Path(out_dir)
    save_splits(splits, out_dir, extra_meta={'prep': report})
    training_side = set(splits.dialogue_ids(SplitName.UNSUPERVISED)) | set(splits.dialogue_ids(SplitName.SUPERVISED))
    serialize_dialogues((d for d in dialogues if d.id in training_side), out_dir / DIALOGUES_FILE)
    logger.info(f"Prepared {corpus.name}: {pool} windows from {len(dialogues)} dialogues, splits {splits.counts}")
    return read_splits_meta(out_dir)


# ---------- build-tasks ----------

def build_task_examples(splits: CorpusSplits, settings: PipelineSettings,
                        dialogues: Optional[Sequence[Dialogue]] = None) -> List[TaskExample]:
    """
    All examples of the enabled tasks: intent examples from the labeled
    training splits, the unsupervised mixture, and the auxiliary tasks.
    """
    tasks = set(settings.tasks.task_names)
    seed = settings.seed
    examples: List[TaskExample] = []
    if TaskName.INTENT in tasks:
        labeled = splits.get(SplitName.SUPERVISED) + splits.get(SplitName.WEAK)
        examples.extend(build_intent_examples(labeled, settings.tasks.intent_k))

    mixture = mixture_from_settings(settings)
    unsupervised_tasks = tasks & {TaskName.GEN3, TaskName.REORDER}
    if unsupervised_tasks:
        unsupervised = splits.get(SplitName.UNSUPERVISED)
        pools = {
            TaskName.GEN3: build_3ug_examples(unsupervised),
            TaskName.REORDER: build_reorder_examples(unsupervised, derive_seed(seed, "tasks.reorder")),
        }
        only_unsupervised = MixtureSpec(reorder_ratio=mixture.reorder_ratio, tasks=frozenset(unsupervised_tasks),
                                        counts=mixture.counts)
        examples.extend(build_mixture(only_unsupervised, pools, derive_seed(seed, "tasks.mixture")))

    dialogues = list(dialogues or [])
    if TaskName.ESCALATION in tasks:
        try:
            examples.extend(build_escalation_examples(dialogues))
        except TaskNotApplicableError as e:
            logger.warning(f"Skipping escalation task: {e}")
    if TaskName.REPETITION in tasks:
        examples.extend(build_repetition_examples(dialogues, settings.tasks.repetition_threshold))
    return examples


def build_tasks_stage(splits_dir: Union[str, Path], settings: PipelineSettings,
                      out_path: Union[str, Path]) -> Dict[str, int]:
    """Write the enabled tasks' examples to ``out_path``; returns counts per task."""
    splits = load_splits(splits_dir)
    examples = build_task_examples(splits, settings, load_dialogues(splits_dir))
    write_jsonl(out_path, (e.to_dict() for e in examples))
    counts = task_counts(examples)
    logger.info(f"Built {len(examples)} task examples {counts}")
    return counts


# ---------- weaklabel ----------

def weaklabel_stage(splits_dir: Union[str, Path], settings: PipelineSettings,
                    report_path: Union[str, Path], max_workers: int = 2) -> Dict[str, Any]:
    """
    Add the weak split to a splits directory.

    The two classifiers of ``settings.weak`` are fitted on the supervised
    split; unsupervised windows they agree on form the weak split.
    """
    splits_dir = Path(splits_dir)
    splits = load_splits(splits_dir)
    backends = [parse_classifier_spec(settings.weak.backend_a), parse_classifier_spec(settings.weak.backend_b)]
    report = weak_label(
        splits.get(SplitName.UNSUPERVISED),
        splits.get(SplitName.SUPERVISED),
        backends,
        utterances=settings.weak.utterances,
        dev=splits.get(SplitName.DEV),
        max_workers=max_workers,
    )
    meta = read_splits_meta(splits_dir)
    extra = {k: v for k, v in meta.items() if k not in _META_BASE_KEYS}
    extra['weak'] = {'agreed': report.agreed, 'total_unlabeled': report.total_unlabeled}
    save_splits(splits.with_split(SplitName.WEAK, report.windows), splits_dir, extra_meta=extra)
    write_json(report_path, report.to_dict())
    logger.info(f"Weak labeling: {report.agreed}/{report.total_unlabeled} windows agreed")
    return report.to_dict()


# ---------- train ----------

def train_stage(run_dir: RunDirectory, settings: PipelineSettings, regime: str) -> RunManifest:
    """Train one regime from the run's splits and checkpoint it."""
    spec = regime_from_settings(settings, regime)
    splits = load_splits(run_dir.splits_dir)
    dialogues = load_dialogues(run_dir.splits_dir) if _needs_dialogues(spec) else None
    backend = BackendManager.create(settings.backend)
    backend, manifest = run_regime(spec, splits, backend, settings.seed, dialogues,
                                   examples_dir=run_dir.examples_dir)
    manifest.config_hash = settings.hash
    backend.save(run_dir.checkpoint(spec.name.value))
    run_dir.record_regime(manifest)
    logger.info(f"Trained {spec.name.value}: {[s.to_dict()['example_counts'] for s in manifest.stages]}")
    return manifest


def sweep_stage(run_dir: RunDirectory, settings: PipelineSettings,
                regime: Optional[str] = None, ratios: Optional[Sequence[float]] = None,
                max_workers: int = 1) -> List[Tuple[float, float]]:
    """Reordering-ratio sweep; writes ``sweep.jsonl`` and ``sweep.png`` reports."""
    ratios = list(ratios if ratios is not None else settings.harness.sweep_ratios)
    if regime is None:
        regime = next((r for r in settings.training.regimes
                       if regime_from_settings(settings, r).uses_unsupervised), None)
        if regime is None:
            raise ConfigurationError("no configured regime has an unsupervised stage to sweep")
    spec = regime_from_settings(settings, regime)
    splits = load_splits(run_dir.splits_dir)
    dialogues = load_dialogues(run_dir.splits_dir) if _needs_dialogues(spec) else None
    points = sweep_ratio(spec, ratios, splits, lambda: BackendManager.create(settings.backend),
                         settings.seed, dialogues, max_workers=max_workers)
    write_sweep(run_dir.report("sweep.jsonl"), points, spec.name.value)
    plot_sweep(points, run_dir.report("sweep.png"), spec.name.value)
    return points


# ---------- eval ----------

def _uses_unsupervised(run_dir: RunDirectory, model: str) -> bool:
    manifest = run_dir.regime_manifests().get(model)
    if manifest is None:
        return False
    return any(UNSUPERVISED_MIXTURE in stage.sources for stage in manifest.stages)


def resolve_generators(run_dir: RunDirectory, settings: PipelineSettings) -> List[str]:
    """
    Generator models for the look-ahead scenarios.

    ``inference.generators`` when set (each must be trained), else the last
    trained regime that saw the unsupervised mixture, else none.
    """
    trained = run_dir.trained_models()
    configured = settings.inference.generators
    if configured:
        missing = [g for g in configured if g not in trained]
        if missing:
            raise ConfigurationError(f"generator models not trained: {', '.join(missing)}")
        return list(configured)
    candidates = [m for m in trained if _uses_unsupervised(run_dir, m)]
    return candidates[-1:]


def _scenario_specs(model: str, settings: PipelineSettings, generators: Sequence[str],
                    backends: Dict[str, Seq2SeqBackend], rnd3_pool: Optional[List[str]]) -> List[ScenarioSpec]:
    inference = settings.inference
    specs: List[ScenarioSpec] = []
    for name in inference.scenarios:
        kind = ScenarioKind(name)
        # SUC is a first-utterance classifier
        if model == RegimeName.SUC.value and kind is not ScenarioKind.U1:
            continue
        if kind in (ScenarioKind.U1, ScenarioKind.U2, ScenarioKind.U3):
            specs.append(ScenarioSpec(kind))
        elif kind is ScenarioKind.RND3 and rnd3_pool:
            specs.append(ScenarioSpec(kind, seed=derive_seed(settings.seed, "eval.rnd3"), rnd3_pool=rnd3_pool))
        elif not generators:
            logger.warning(f"{model}: no generator model, skipping {kind.value}")
        else:
            names = generators[:1] if kind is ScenarioKind.RND3 else generators
            for generator in names:
                specs.append(ScenarioSpec(
                    kind,
                    num_samples=inference.gen5x_samples if kind is ScenarioKind.GEN5X else None,
                    generator=backends[generator],
                    seed=derive_seed(settings.seed, f"eval.{kind.value}.{generator}"),
                    generator_name=generator,
                ))
    return specs


def _baseline_results(settings: PipelineSettings, results: List[ScenarioResult]) -> List[ScenarioResult]:
    baseline_run = settings.inference.baseline_run
    if not baseline_run:
        return results
    path = RunDirectory(baseline_run).report(RESULTS_FILE)
    if not path.exists():
        raise ConfigurationError(f"baseline run {baseline_run} has no {RESULTS_FILE}")
    return read_results(path)


def eval_stage(run_dir: RunDirectory, settings: PipelineSettings, max_workers: int = 1) -> List[ScenarioResult]:
    """Evaluate every trained model under the configured scenarios."""
    splits = load_splits(run_dir.splits_dir)
    windows = splits.get(SplitName(settings.inference.split))
    labels = LabelSpace(splits.intents)
    models = [m for m in settings.training.regimes if m in run_dir.trained_models()]
    if not models:
        raise ConfigurationError(f"no trained models in {run_dir.root}")
    generators = resolve_generators(run_dir, settings)
    backends = {m: BackendManager.load(run_dir.checkpoint(m)) for m in dict.fromkeys(models + generators)}

    rnd3_pool = None
    if settings.inference.rnd3_source == "corpus":
        rnd3_pool = [w.utterances[2].text for w in splits.get(SplitName.UNSUPERVISED)]

    results: List[ScenarioResult] = []
    for model in models:
        specs = _scenario_specs(model, settings, generators, backends, rnd3_pool)
        evaluation = evaluate(windows, specs, backends[model], labels, model=model, max_workers=max_workers)
        write_jsonl(run_dir.predictions_dir / f"{model}.jsonl", evaluation.predictions)
        results.extend(evaluation.results)

    inference = settings.inference
    baseline = baseline_accuracy(_baseline_results(settings, results), inference.baseline_model,
                                 inference.baseline_scenario)
    if baseline is None:
        logger.warning(f"Baseline {inference.baseline_model} {inference.baseline_scenario} not found; no deltas")
    apply_baseline(results, baseline)
    write_results(run_dir.report(RESULTS_FILE), results)
    return results



# ---------- ablation ----------

def ablation_stage(run_dir: RunDirectory, settings: PipelineSettings,
                   tasks: Optional[Sequence[str]] = None, regime: Optional[str] = None,
                   max_workers: int = 1) -> List[ScenarioResult]:
    """
    Auxiliary-task importance; writes ``ablation.jsonl`` and ``ablation_table.md``.

    Tasks default to ``harness.ablation_tasks``, else every enabled auxiliary
    task. Deltas are measured against the configured baseline cell when eval
    has already written its results.
    """
    names = list(tasks if tasks is not None else settings.harness.ablation_tasks)
    if not names:
        names = [t.value for t in settings.tasks.task_names if t in ABLATION_TASKS]
    try:
        task_names = [TaskName(name) for name in names]
    except ValueError as e:
        raise ConfigurationError(f"unknown task: {e}") from e
    spec = regime_from_settings(settings, regime or settings.harness.ablation_regime)
    splits = load_splits(run_dir.splits_dir)
    dialogues = load_dialogues(run_dir.splits_dir) if any(t in AUX_SOURCES for t in task_names) else None
    results = ablate_tasks(spec, task_names, splits, lambda: BackendManager.create(settings.backend),
                           settings.seed, dialogues, max_workers=max_workers)

    results_path = run_dir.report(RESULTS_FILE)
    own = read_results(results_path) if results_path.exists() else []
    inference = settings.inference
    apply_baseline(results, baseline_accuracy(_baseline_results(settings, own), inference.baseline_model,
                                              inference.baseline_scenario))
    write_results(run_dir.report(ABLATION_FILE), results)
    run_dir.report(ABLATION_TABLE).write_text(report_ablation_table(results), encoding='utf-8')
    return results

# ---------- conflicts ----------

def conflicts_stage(run_dir: RunDirectory, settings: PipelineSettings) -> List[ConflictReport]:
    """
    Counterfactual conflict resolution for each configured selection mode.

    The generator is the default look-ahead generator; the classifier is
    ``conflicts.model`` or, when unset, the generator itself.
    """
    generators = resolve_generators(run_dir, settings)
    classifier_name = settings.conflicts.model or (generators[0] if generators else None)
    if classifier_name is None or not generators:
        logger.warning("No generator model trained; skipping conflict resolution")
        return []
    if classifier_name not in run_dir.trained_models():
        raise ConfigurationError(f"conflict model {classifier_name} is not trained")

    splits = load_splits(run_dir.splits_dir)
    windows = splits.get(SplitName(settings.inference.split))
    labels = LabelSpace(splits.intents)
    corpus = splits.get(SplitName.SUPERVISED) + splits.get(SplitName.WEAK)
    classifier = BackendManager.load(run_dir.checkpoint(classifier_name))
    generator = classifier if generators[0] == classifier_name else BackendManager.load(
        run_dir.checkpoint(generators[0]))

    reports: List[ConflictReport] = []
    for mode in settings.conflicts.modes:
        run = run_conflicts(windows, classifier, generator, labels, corpus, mode,
                            threshold=settings.conflicts.threshold, rule=settings.conflicts.rule,
                            seed=derive_seed(settings.seed, "conflicts"))
        write_jsonl(run_dir.predictions_dir / f"conflicts.{mode}.jsonl", (c.to_dict() for c in run.cases))
        reports.append(run.report)
    write_jsonl(run_dir.report(CONFLICTS_FILE), (r.to_dict() for r in reports))
    return reports


# ---------- report ----------

def report_stage(run_dir: RunDirectory, settings: PipelineSettings) -> Dict[str, str]:
    """Render tables from the result records; returns name -> path."""
    results_path = run_dir.report(RESULTS_FILE)
    if not results_path.exists():
        raise ConfigurationError(f"{results_path} not found; run eval first")
    results = read_results(results_path)
    generators = resolve_generators(run_dir, settings)
    default_generator = generators[0] if generators else None
    models = [m for m in settings.training.regimes if any(r.model == m for r in results)]

    tables = {
        'main_table.md': report_main_table(results, models, MAIN_SCENARIOS, default_generator),
        'main_table_delta.md': report_main_table(results, models, MAIN_SCENARIOS, default_generator, mode="delta"),
        'lookahead_table.md': report_lookahead_table(results, models, generators or None),
    }
    conflicts_path = run_dir.report(CONFLICTS_FILE)
    if conflicts_path.exists():
        reports = [ConflictReport.from_dict(r) for r in read_jsonl(conflicts_path)]
        tables['conflicts_table.md'] = report_conflict_table(reports)
    ablation_path = run_dir.report(ABLATION_FILE)
    if ablation_path.exists():
        tables[ABLATION_TABLE] = report_ablation_table(read_results(ablation_path))

    written: Dict[str, str] = {}
    for name, text in tables.items():
        path = run_dir.report(name)
        path.write_text(text, encoding='utf-8')
        written[name] = str(path)
    grid_path = run_dir.report("accuracy_grid.csv")
    accuracy_grid(results).to_csv(grid_path, float_format='%.6f')
    written['accuracy_grid.csv'] = str(grid_path)
    logger.info(f"Wrote {len(written)} reports to {run_dir.reports_dir}")
    return written


# ---------- pipeline ----------

def _resolve_settings(config: Union[str, Path, PipelineSettings, None]) -> PipelineSettings:
    if isinstance(config, PipelineSettings):
        return config
    return load_settings(config)


def run_pipeline(config: Union[str, Path, PipelineSettings, None],
                 run_dir: Optional[Union[str, Path]] = None,
                 stop_after: Optional[str] = None) -> RunDirectory:
    """
    Run every stage, skipping those the run directory marks complete.

    Args:
        config: Configuration file or validated settings
        run_dir: Run directory (defaults to ``harness.run_dir``)
        stop_after: Stop once this stage is complete

    Returns:
        The run directory

    Raises:
        ConfigurationError: on an invalid configuration, before any work
        StageError: when a stage fails; ``reports/error.json`` holds the record
    """
    settings = _resolve_settings(config)
    if stop_after is not None and stop_after not in STAGES:
        raise ConfigurationError(f"unknown stage '{stop_after}'")
    directory = RunDirectory(run_dir or settings.harness.run_dir)
    directory.open(settings.hash, settings.seed)
    save_settings(settings, directory.config_path)
    stale_error = directory.report(ERROR_FILE)
    if stale_error.exists():
        stale_error.unlink()
    max_workers = init_config().max_workers

    def train_all() -> Dict[str, Any]:
        done = directory.trained_models()
        for regime in settings.training.regimes:
            if regime in done:
                logger.info(f"{regime} already trained; skipping")
                continue
            train_stage(directory, settings, regime)
        return {'regimes': list(settings.training.regimes)}

    plan: List[Tuple[str, bool, Callable[[], Any]]] = [
        ("prep", True, lambda: prep_corpus(settings, directory.splits_dir)),
        ("build-tasks", True,
         lambda: build_tasks_stage(directory.splits_dir, settings, directory.examples_dir / TASKS_FILE)),
        ("weaklabel", settings.weak.enabled,
         lambda: weaklabel_stage(directory.splits_dir, settings, directory.report(WEAK_REPORT_FILE), max_workers)),
        ("train", True, train_all),
        ("sweep", bool(settings.harness.sweep_ratios),
         lambda: [{'ratio': r, 'accuracy': a} for r, a in sweep_stage(directory, settings)]),
        ("eval", True, lambda: [r.to_dict() for r in eval_stage(directory, settings, max_workers)]),
        ("ablation", bool(settings.harness.ablation_tasks),
         lambda: [r.to_dict() for r in ablation_stage(directory, settings, max_workers=max_workers)]),
        ("conflicts", settings.conflicts.enabled,
         lambda: [r.to_dict() for r in conflicts_stage(directory, settings)]),
        ("report", True, lambda: report_stage(directory, settings)),
    ]

    with run_log(directory.root):
        for stage, enabled, action in plan:
            if enabled and not directory.is_done(stage):
                logger.info(f"Stage {stage}: starting")
                try:
                    info = action()
                except Exception as e:
                    error = StageError(stage, e)
                    directory.write_error(error.to_record())
                    logger.error(str(error))
                    raise error from e
                directory.mark_done(stage, info if isinstance(info, dict) else {'records': info})
            elif enabled:
                logger.info(f"Stage {stage}: already complete")
            if stage == stop_after:
                logger.info(f"Stopping after {stage}")
                break
    return directory
