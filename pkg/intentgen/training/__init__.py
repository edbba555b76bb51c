"""Training regimes."""

from .regimes import (
    ABLATION_ALL,
    ABLATION_TASKS,
    ExampleSources,
    RegimeSpec,
    StageSpec,
    ablate_tasks,
    build_regime,
    build_stage_examples,
    replay_manifest,
    run_regime,
    sweep_ratio,
    with_tasks,
)

__all__ = [
    'ABLATION_ALL',
    'ABLATION_TASKS',
    'ExampleSources',
    'RegimeSpec',
    'StageSpec',
    'ablate_tasks',
    'build_regime',
    'build_stage_examples',
    'replay_manifest',
    'run_regime',
    'sweep_ratio',
    'with_tasks',
]
