#!/usr/bin/env python3
"""Conflict resolution command."""

import sys

import click

from ...harness import conflicts_stage, report_conflict_table
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--mode', 'modes', multiple=True,
              type=click.Choice(['threshold', 'mistake-oracle', 'conflict-oracle',
                                 'mistake_oracle', 'conflict_oracle']),
              help='Conflict selection mode; repeatable')
@click.option('--threshold', type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True),
              help='Score threshold for the threshold mode')
@click.option('--rule', type=click.Choice(['max', 'average']), help='How counterfactual scores are combined')
@click.option('--model', help='Classifier model (default: the generator model)')
def conflicts(config_path, run_dir, modes, threshold, rule, model):
    """
    Resolve conflicting intents by generating a third utterance per candidate.

    Example:
        intentgen conflicts --run-dir runs/edu --mode conflict-oracle --rule max
    """
    try:
        overrides = {'conflicts': {
            'modes': list(modes) or None,
            'threshold': threshold,
            'rule': rule,
            'model': model,
        }}
        settings, directory = load_context(config_path, run_dir, overrides)
        reports = conflicts_stage(directory, settings)
        if not reports:
            click.echo("⚠ No generator model trained; nothing to resolve", err=True)
            sys.exit(1)
        click.echo(f"✓ Resolved conflicts in {len(reports)} modes")
        click.echo(report_conflict_table(reports), nl=False)
    except IntentGenError as e:
        logger.error(f"Conflict resolution failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Conflict resolution failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
