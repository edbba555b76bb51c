"""CLI commands and the options they share."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import click

from ...config import init_config
from ...harness import RunDirectory
from ...settings import PipelineSettings, load_settings, override_settings
from ...utils.errors import UsageError


def config_option(func):
    return click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                        help='Pipeline configuration file (YAML)')(func)


def run_dir_option(func):
    return click.option('--run-dir', type=click.Path(file_okay=False),
                        help='Run directory (default: harness.run_dir from the config)')(func)


def load_context(config_path: Optional[str], run_dir: Optional[str],
                 overrides: Optional[Dict[str, Any]] = None) -> Tuple[PipelineSettings, RunDirectory]:
    """Validated settings with command-line overrides, plus the run directory."""
    settings = override_settings(load_settings(config_path), overrides or {})
    directory = RunDirectory(Path(run_dir) if run_dir else Path(settings.harness.run_dir)).ensure()
    return settings, directory


def split_list(value: Optional[str]) -> Optional[List[str]]:
    """'a, b,c' -> ['a', 'b', 'c']; None stays None."""
    if value is None:
        return None
    items = [item.strip() for item in value.split(',') if item.strip()]
    if not items:
        raise UsageError("expected a comma-separated list")
    return items


def number_list(value: Optional[str], kind=float) -> Optional[List[Any]]:
    items = split_list(value)
    if items is None:
        return None
    try:
        return [kind(item) for item in items]
    except ValueError:
        raise UsageError(f"invalid number in '{value}'") from None


def max_workers() -> int:
    """Worker threads from the environment config carried on the click context."""
    ctx = click.get_current_context(silent=True)
    if ctx is not None and isinstance(ctx.obj, dict) and 'config' in ctx.obj:
        return ctx.obj['config'].max_workers
    return init_config().max_workers
