#!/usr/bin/env python3
"""Corpus preparation command."""

import json
import sys

import click

from ...harness import prep_corpus
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, number_list, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--input', 'input_path', type=click.Path(exists=True), help='Corpus file or directory')
@click.option('--format', 'input_format', type=click.Choice(['multiwoz', 'sgd', 'canonical', 'synthetic']),
              help='Corpus format')
@click.option('--label-field', type=click.Choice(['intent', 'domain']), help='Label taken from each frame')
@click.option('--name', help='Dataset name (multiwoz, sgd and edu have published shapes)')
@click.option('--sizes', help='Split sizes U,S,DEV,TEST (e.g. 2538,1012,211,233)')
@click.option('--out', type=click.Path(file_okay=False), help='Splits directory (default: RUN_DIR/splits)')
@click.option('--output-format', 'output_format', type=click.Choice(['text', 'json']), default='text',
              help='Output format')
def prep(config_path, run_dir, input_path, input_format, label_field, name, sizes, out, output_format):
    """
    Extract intent windows and write dialogue-disjoint splits.

    Example:
        intentgen prep --format sgd --input data/sgd --name sgd --sizes 23128,1000,4933,4995
    """
    try:
        overrides = {'corpus': {
            'path': input_path,
            'format': input_format,
            'label_field': label_field,
            'name': name,
            'sizes': number_list(sizes, int),
        }}
        settings, directory = load_context(config_path, run_dir, overrides)
        meta = prep_corpus(settings, out or directory.splits_dir)

        if output_format == 'json':
            click.echo(json.dumps(meta, indent=2, sort_keys=True))
            return
        report = meta.get('prep', {})
        click.echo(f"✓ Prepared {meta['name']}: {report.get('pool')} windows, {len(meta['intents'])} intents")
        for split, count in meta['counts'].items():
            click.echo(f"  {split}: {count}")
        if 'published_pool' in report:
            click.echo(f"  Published pool: {report['published_pool']} (deviation {report['pool_deviation']:+d})")
    except IntentGenError as e:
        logger.error(f"Prep failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Prep failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
