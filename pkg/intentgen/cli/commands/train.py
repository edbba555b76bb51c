#!/usr/bin/env python3
"""Regime training command."""

import sys

import click

from ...harness import train_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--regime', 'regimes', multiple=True,
              help='Regime to train (SUC, SDC, PART_SDC, ALL, ALL_SDC); repeatable')
@click.option('--backend', 'backend_kind', type=click.Choice(['oracle', 'tiny', 'full']), help='Backend kind')
@click.option('--model-name', help='Pretrained checkpoint name or path for trainable backends')
@click.option('--epochs', type=click.IntRange(min=1), help='Maximum epochs per stage')
@click.option('--script', type=click.Path(exists=True, dir_okay=False), help='Oracle rule script (JSONL)')
def train(config_path, run_dir, regimes, backend_kind, model_name, epochs, script):
    """
    Train regimes on the run's splits and checkpoint them.

    Example:
        intentgen train --run-dir runs/edu --regime SDC --regime ALL_SDC --backend tiny
    """
    try:
        overrides = {
            'training': {'regimes': list(regimes) or None},
            'backend': {'kind': backend_kind, 'model_name': model_name, 'epochs': epochs, 'script': script},
        }
        settings, directory = load_context(config_path, run_dir, overrides)
        for regime in settings.training.regimes:
            manifest = train_stage(directory, settings, regime)
            click.echo(f"✓ Trained {regime} ({manifest.run_id})")
            for stage in manifest.stages:
                early = ", stopped early" if stage.stopped_early else ""
                click.echo(f"  {stage.name}: {stage.total_examples} examples, "
                           f"{stage.epochs_run} epochs{early}")
    except IntentGenError as e:
        logger.error(f"Training failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Training failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
