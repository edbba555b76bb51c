#!/usr/bin/env python3
"""Full pipeline command."""

import sys

import click

from ...harness import STAGES, run_pipeline
from ...utils.errors import IntentGenError, StageError
from ...utils.logging import get_logger
from . import load_context, run_dir_option

logger = get_logger(__name__)


@click.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Pipeline configuration file (YAML)')
@run_dir_option
@click.option('--stop-after', type=click.Choice(STAGES), help='Stop once this stage is complete')
def run(config_path, run_dir, stop_after):
    """
    Run prep, build-tasks, weaklabel, train, eval, conflicts and report.

    Completed stages are skipped, so re-running resumes an interrupted run.

    Example:
        intentgen run --config configs/oracle_smoke.yaml --run-dir runs/smoke
    """
    try:
        settings, _ = load_context(config_path, run_dir)
        directory = run_pipeline(settings, run_dir, stop_after=stop_after)
        completed = directory.load_manifest().get('completed', [])
        click.echo(f"✓ Run {directory.root}: {', '.join(completed)}")
        main_table = directory.report("main_table.md")
        if main_table.exists():
            click.echo(main_table.read_text(encoding='utf-8'), nl=False)
    except StageError as e:
        logger.error(f"Pipeline failed: {e}")
        click.echo(f"✗ Error in stage '{e.stage}': {e.cause}", err=True)
        sys.exit(1)
    except IntentGenError as e:
        logger.error(f"Pipeline failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
