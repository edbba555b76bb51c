#!/usr/bin/env python3
"""Task example construction command."""

import sys

import click

from ...harness import build_tasks_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, run_dir_option, split_list

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--splits', 'splits_dir', type=click.Path(exists=True, file_okay=False),
              help='Splits directory (default: RUN_DIR/splits)')
@click.option('--tasks', help='Comma-separated tasks: intent,gen3,reorder,escalation,repetition')
@click.option('--k', 'intent_k', type=click.IntRange(1, 3), help='Utterances per intent example')
@click.option('--ratio', 'reorder_ratio', type=click.FloatRange(0.0, 1.0),
              help='Share of the unsupervised budget used for reordering')
@click.option('--budget', type=click.IntRange(min=0), help='Unsupervised budget B (default: pool size)')
@click.option('--out', type=click.Path(dir_okay=False), help='Output JSONL (default: RUN_DIR/examples/tasks.jsonl)')
def build_tasks(config_path, run_dir, splits_dir, tasks, intent_k, reorder_ratio, budget, out):
    """
    Build the text-to-text examples of the enabled tasks.

    Example:
        intentgen build-tasks --run-dir runs/edu --tasks gen3,reorder --ratio 0.3
    """
    try:
        overrides = {'tasks': {
            'tasks': split_list(tasks),
            'intent_k': intent_k,
            'reorder_ratio': reorder_ratio,
            'unsupervised_budget': budget,
        }}
        settings, directory = load_context(config_path, run_dir, overrides)
        out = out or directory.examples_dir / "tasks.jsonl"
        counts = build_tasks_stage(splits_dir or directory.splits_dir, settings, out)

        click.echo(f"✓ Wrote {sum(counts.values())} examples to {out}")
        for task, count in counts.items():
            click.echo(f"  {task}: {count}")
    except IntentGenError as e:
        logger.error(f"Task construction failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Task construction failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
