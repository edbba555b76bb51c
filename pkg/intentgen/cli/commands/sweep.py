#!/usr/bin/env python3
"""Reordering-ratio sweep command."""

import sys

import click

from ...constants import SWEEP_REORDER_RATIOS
from ...harness import sweep_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, max_workers, number_list, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--regime', help='Regime with an unsupervised stage (default: first configured one)')
@click.option('--ratios', default=','.join(str(r) for r in SWEEP_REORDER_RATIOS), show_default=True,
              help='Comma-separated ratios')
def sweep(config_path, run_dir, regime, ratios):
    """
    Train one model per reordering ratio and plot dev 3-u accuracy.

    Example:
        intentgen sweep --run-dir runs/edu --regime ALL_SDC --ratios 0,0.1,0.3
    """
    try:
        settings, directory = load_context(config_path, run_dir)
        points = sweep_stage(directory, settings, regime, number_list(ratios, float), max_workers())
        best_ratio, best_accuracy = max(points, key=lambda p: (p[1], -p[0]))
        click.echo(f"✓ Swept {len(points)} ratios")
        for ratio, accuracy in points:
            click.echo(f"  r={ratio}: {100 * accuracy:.1f}%")
        click.echo(f"  Best: r={best_ratio} ({100 * best_accuracy:.1f}%)")
        click.echo(f"  Figure: {directory.report('sweep.png')}")
    except IntentGenError as e:
        logger.error(f"Sweep failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Sweep failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
