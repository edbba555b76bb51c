#!/usr/bin/env python3
"""Auxiliary-task ablation command."""

import sys

import click

from ...harness import ablation_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, max_workers, run_dir_option, split_list

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--tasks', help='Comma-separated auxiliary tasks (default: harness.ablation_tasks, '
                              'else every enabled auxiliary task)')
@click.option('--regime', help='Regime layout to train (default: harness.ablation_regime)')
def ablate(config_path, run_dir, tasks, regime):
    """
    Train one model per auxiliary task, plus one with all of them, and score test 3-u.

    Example:
        intentgen ablate --run-dir runs/edu --tasks gen3,reorder,escalation,repetition
    """
    try:
        settings, directory = load_context(config_path, run_dir)
        results = ablation_stage(directory, settings, split_list(tasks), regime, max_workers())
        click.echo(f"✓ Ablated {len(results) - 1} tasks")
        for result in results:
            click.echo(f"  {result.model}: {100 * result.accuracy:.1f}%")
        click.echo(f"  Table: {directory.report('ablation_table.md')}")
    except IntentGenError as e:
        logger.error(f"Ablation failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Ablation failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
