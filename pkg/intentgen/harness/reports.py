#!/usr/bin/env python3
"""Result records and report tables.

Tables are markdown pipe tables rendered purely from ScenarioResult
records. Percentages round half-up to one decimal; absent cells are "-".
"""

from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import matplotlib
matplotlib.use('Agg')  # Headless figure output
import matplotlib.pyplot as plt
import pandas as pd

from ..constants import ABLATION_ALL, REGIME_LABELS, SCENARIO_LABELS, TASK_LABELS, RegimeName, ScenarioKind, TaskName
from ..models.conflict import ConflictReport
from ..models.run import ScenarioResult
from ..utils.errors import UsageError
from ..utils.io import iter_jsonl, write_jsonl
from ..utils.logging import get_logger

logger = get_logger(__name__)

MISSING = "-"
MAIN_SCENARIOS = ("u1", "u2", "u3", "gen5x")
LOOKAHEAD_SCENARIOS = ("gen3", "gen5x")
REGIME_ORDER = [r.value for r in RegimeName]
_TENTH = Decimal("0.1")


def format_percent(t: int, d: int) -> str:
    """100 * t / d rounded half-up to one decimal: (230, 233) -> "98.7"."""
    if d <= 0:
        raise UsageError("percentage of an empty total")
    value = (Decimal(t) * 100 / Decimal(d)).quantize(_TENTH, rounding=ROUND_HALF_UP)
    return str(value)


def format_delta(delta: Optional[float]) -> str:
    """Accuracy difference in percentage points with an explicit sign; zero is "0.0"."""
    if delta is None:
        return MISSING
    value = Decimal(repr(delta * 100)).quantize(_TENTH, rounding=ROUND_HALF_UP)
    if value == 0:
        return "0.0"
    return f"+{value}" if value > 0 else str(value)


def model_label(model: str) -> str:
    """Table label of a model: regime names get their dashed form."""
    try:
        return REGIME_LABELS[RegimeName(model)]
    except ValueError:
        return model


def scenario_label(scenario: str) -> str:
    try:
        return SCENARIO_LABELS[ScenarioKind(scenario)]
    except ValueError:
        return scenario


def _model_order(models: Iterable[str]) -> List[str]:
    unique = list(dict.fromkeys(models))
    return sorted(unique, key=lambda m: (REGIME_ORDER.index(m) if m in REGIME_ORDER else len(REGIME_ORDER), m))


def _render(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _find(results: Sequence[ScenarioResult], model: str, scenario: str,
          generator: Optional[str] = None) -> Optional[ScenarioResult]:
    for result in results:
        if result.model != model or result.scenario != scenario:
            continue
        if generator is not None and result.generator != generator:
            continue
        return result
    return None


def _cell(result: Optional[ScenarioResult], mode: str) -> str:
    if result is None:
        return MISSING
    if mode == "delta":
        return format_delta(result.delta_vs_baseline)
    return format_percent(result.t, result.d)


def report_main_table(results: Sequence[ScenarioResult], models: Optional[Sequence[str]] = None,
                      scenarios: Sequence[str] = MAIN_SCENARIOS, generator: Optional[str] = None,
                      mode: str = "accuracy") -> str:
    """
    Render the model x scenario accuracy table.

    Args:
        results: Scenario results
        models: Row order (defaults to the models present, regimes first)
        scenarios: Column order
        generator: Generator whose look-ahead results fill generative columns
        mode: "accuracy" for percentages, "delta" for points vs. the baseline

    Returns:
        Markdown table text; an empty grid gives the header alone
    """
    if mode not in ("accuracy", "delta"):
        raise UsageError(f"unknown table mode '{mode}'")
    results = list(results)
    rows_for = list(models) if models is not None else _model_order(r.model for r in results)
    header = ["Model"] + [scenario_label(s) for s in scenarios]
    rows = []
    for model in rows_for:
        cells = []
        for scenario in scenarios:
            wanted = generator if scenario in LOOKAHEAD_SCENARIOS or scenario == "rnd3" else None
            cells.append(_cell(_find(results, model, scenario, wanted), mode))
        rows.append([model_label(model)] + cells)
    return _render(header, rows)


def report_lookahead_table(results: Sequence[ScenarioResult], classifiers: Optional[Sequence[str]] = None,
                           generators: Optional[Sequence[str]] = None) -> str:
    """
    Render generated-utterance quality per generator.

    Rows are classifiers. Columns are 3-gen for each generator, then 3-5xg
    for each generator, then 3-rnd.
    """
    results = list(results)
    lookahead = [r for r in results if r.scenario in LOOKAHEAD_SCENARIOS + ("rnd3",)]
    if generators is None:
        generators = _model_order(r.generator for r in lookahead
                                  if r.generator is not None and r.scenario in LOOKAHEAD_SCENARIOS)
    if classifiers is None:
        classifiers = _model_order(r.model for r in lookahead)

    header = ["Model"]
    for scenario in LOOKAHEAD_SCENARIOS:
        header.extend(f"{scenario_label(scenario)} ({model_label(g)})" for g in generators)
    header.append(scenario_label("rnd3"))

    rows = []
    for model in classifiers:
        row = [model_label(model)]
        for scenario in LOOKAHEAD_SCENARIOS:
            row.extend(_cell(_find(results, model, scenario, g), "accuracy") for g in generators)
        rnd = next((r for g in generators for r in [_find(results, model, "rnd3", g)] if r), None)
        row.append(_cell(rnd or _find(results, model, "rnd3"), "accuracy"))
        rows.append(row)
    return _render(header, rows)


def report_conflict_table(reports: Sequence[ConflictReport]) -> str:
    """Conflicts found, mistakes before/after and error reduction per selection mode."""
    header = ["Mode", "Conflicts", "Mistakes before", "Mistakes after", "Fixed", "Broken",
              "Error reduction"]
    rows = []
    for report in reports:
        if report.mistakes_before > 0:
            reduction = format_percent(report.mistakes_before - report.mistakes_after,
                                       report.mistakes_before)
        else:
            reduction = MISSING
        rows.append([
            report.mode.value.replace('_', '-'),
            str(report.conflicts_found),
            str(report.mistakes_before),
            str(report.mistakes_after),
            str(report.fixed),
            str(report.broken),
            reduction,
        ])
    return _render(header, rows)


def report_ablation_table(results: Sequence[ScenarioResult]) -> str:
    """
    Auxiliary-task importance: one row per single-task model, then all tasks.

    Rows are named by ``ablate_tasks`` (task value or ``all``). The delta
    column is filled when the records carry one.
    """
    results = list(results)
    header = ["Tasks", scenario_label("u3"), "Δ"]
    singles = [r for r in results if r.model != ABLATION_ALL]
    combined = [r for r in results if r.model == ABLATION_ALL]
    rows = []
    for result in singles + combined:
        if result.model == ABLATION_ALL:
            name = "All tasks"
        else:
            try:
                name = TASK_LABELS[TaskName(result.model)]
            except ValueError:
                name = result.model
        rows.append([name, _cell(result, "accuracy"), format_delta(result.delta_vs_baseline)])
    return _render(header, rows)


# ---------- records ----------

def write_results(path: Union[str, Path], results: Iterable[ScenarioResult]) -> int:
    """Write one JSON record per result (t and d included)."""
    return write_jsonl(path, (r.to_dict() for r in results))


def read_results(path: Union[str, Path]) -> List[ScenarioResult]:
    return [ScenarioResult.from_dict(record) for record in iter_jsonl(path)]


def results_frame(results: Iterable[ScenarioResult]) -> pd.DataFrame:
    """Results as a DataFrame with one row per record."""
    columns = ['model', 'scenario', 'generator', 't', 'd', 'accuracy', 'delta_vs_baseline']
    return pd.DataFrame([r.to_dict() for r in results], columns=columns)


def accuracy_grid(results: Iterable[ScenarioResult]) -> pd.DataFrame:
    """Model x scenario accuracy pivot (first result per cell)."""
    frame = results_frame(results)
    if frame.empty:
        return pd.DataFrame()
    frame['generator'] = frame['generator'].fillna('')
    frame['column'] = frame.apply(
        lambda row: f"{row['scenario']}@{row['generator']}" if row['generator'] else row['scenario'], axis=1
    )
    return frame.pivot_table(index='model', columns='column', values='accuracy', aggfunc='first')


def write_sweep(path: Union[str, Path], points: Sequence[Tuple[float, float]], regime: str) -> int:
    return write_jsonl(path, ({'regime': regime, 'reorder_ratio': r, 'dev_accuracy_u3': a}
                              for r, a in points))


def plot_sweep(points: Sequence[Tuple[float, float]], output_path: Union[str, Path],
               regime: str = "") -> Optional[str]:
    """
    Plot dev 3-u accuracy against the reordering ratio.

    Args:
        points: (ratio, accuracy) pairs
        output_path: PNG path
        regime: Regime name for the title

    Returns:
        The output path, or None when there is nothing to plot
    """
    if not points:
        logger.warning("No sweep points to plot")
        return None
    ordered = sorted(points)
    ratios = [r for r, _ in ordered]
    accuracies = [100 * a for _, a in ordered]

    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    plt.figure(figsize=(8, 5))
    plt.plot(ratios, accuracies, marker='o', linestyle='-', linewidth=2, markersize=6, color='#2196F3')
    plt.xlabel('Reordering ratio', fontsize=12)
    plt.ylabel('Dev accuracy, 3-u (%)', fontsize=12)
    title = 'Accuracy vs. reordering ratio'
    plt.title(f"{title} ({model_label(regime)})" if regime else title, fontsize=14, fontweight='bold')
    plt.grid(True, alpha=0.3)
    plt.tight_layout()
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close()
    return str(output_path)


def baseline_accuracy(results: Sequence[ScenarioResult], model: str, scenario: str = "u1") -> Optional[float]:
    """Accuracy of the named baseline cell, if present."""
    baseline = _find(results, model, scenario)
    return baseline.accuracy if baseline else None


def summarize(results: Sequence[ScenarioResult]) -> Dict[str, str]:
    """One line per result: "model scenario[@generator]" -> "t/d = pct"."""
    summary = {}
    for r in results:
        key = f"{r.model} {r.scenario}" + (f"@{r.generator}" if r.generator else "")
        summary[key] = f"{r.t}/{r.d} = {format_percent(r.t, r.d)}"
    return summary
