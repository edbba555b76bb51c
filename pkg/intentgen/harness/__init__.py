"""Run persistence, reports and the end-to-end pipeline."""

from .run_dir import RunDirectory
from .reports import (
    format_delta,
    format_percent,
    plot_sweep,
    read_results,
    report_ablation_table,
    report_conflict_table,
    report_lookahead_table,
    report_main_table,
    results_frame,
    write_results,
)
from .pipeline import (
    STAGES,
    ablation_stage,
    build_task_examples,
    build_tasks_stage,
    conflicts_stage,
    eval_stage,
    load_corpus,
    prep_corpus,
    report_stage,
    resolve_generators,
    run_pipeline,
    sweep_stage,
    train_stage,
    weaklabel_stage,
)

__all__ = [
    'RunDirectory',
    'format_delta',
    'format_percent',
    'plot_sweep',
    'read_results',
    'report_ablation_table',
    'report_conflict_table',
    'report_lookahead_table',
    'report_main_table',
    'results_frame',
    'write_results',
    'STAGES',
    'ablation_stage',
    'build_task_examples',
    'build_tasks_stage',
    'conflicts_stage',
    'eval_stage',
    'load_corpus',
    'prep_corpus',
    'report_stage',
    'resolve_generators',
    'run_pipeline',
    'sweep_stage',
    'train_stage',
    'weaklabel_stage',
]
