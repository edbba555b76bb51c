#!/usr/bin/env python3
"""Weak labeling command."""

import json
import sys

import click

from ...harness import weaklabel_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, max_workers, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--splits', 'splits_dir', type=click.Path(exists=True, file_okay=False),
              help='Splits directory (default: RUN_DIR/splits)')
@click.option('--backend-a', help='First classifier, e.g. "sgd:seed=13" or "logreg:C=2.0"')
@click.option('--backend-b', help='Second classifier, e.g. "nb:alpha=0.5"')
@click.option('--utterances', type=click.IntRange(1, 3), help='Leading utterances the classifiers see')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False),
              help='Report JSON (default: RUN_DIR/reports/weak_label.json)')
@click.option('--format', 'output_format', type=click.Choice(['text', 'json']), default='text',
              help='Output format')
def weaklabel(config_path, run_dir, splits_dir, backend_a, backend_b, utterances, report_path, output_format):
    """
    Add unlabeled windows both classifiers agree on as the weak split.

    Example:
        intentgen weaklabel --run-dir runs/edu --backend-a sgd:seed=13 --backend-b logreg
    """
    try:
        overrides = {'weak': {'backend_a': backend_a, 'backend_b': backend_b, 'utterances': utterances}}
        settings, directory = load_context(config_path, run_dir, overrides)
        report = weaklabel_stage(splits_dir or directory.splits_dir, settings,
                                 report_path or directory.report("weak_label.json"),
                                 max_workers())

        if output_format == 'json':
            summary = {k: v for k, v in report.items() if k != 'added'}
            click.echo(json.dumps(summary, indent=2, sort_keys=True))
            return
        click.echo(f"✓ Weak split: {report['agreed']}/{report['total_unlabeled']} windows "
                   f"({100 * report['agreement_rate']:.1f}% agreement)")
        for name, accuracy in report['dev_accuracy'].items():
            click.echo(f"  Dev accuracy {name}: {100 * accuracy:.1f}%")
    except IntentGenError as e:
        logger.error(f"Weak labeling failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Weak labeling failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
