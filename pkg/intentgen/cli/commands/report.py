#!/usr/bin/env python3
"""Report rendering command."""

import sys

import click

from ...harness import report_stage
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, run_dir_option

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--table', type=click.Choice(['main', 'delta', 'lookahead', 'conflicts', 'ablation']), default='main',
              show_default=True, help='Table printed to stdout')
def report(config_path, run_dir, table):
    """
    Render the report tables of a run from its result records.

    Example:
        intentgen report --run-dir runs/edu --table delta
    """
    try:
        settings, directory = load_context(config_path, run_dir)
        written = report_stage(directory, settings)
        names = {'main': 'main_table.md', 'delta': 'main_table_delta.md',
                 'lookahead': 'lookahead_table.md', 'conflicts': 'conflicts_table.md',
                 'ablation': 'ablation_table.md'}
        path = written.get(names[table])
        if path is None:
            click.echo(f"⚠ No {table} table for this run", err=True)
        else:
            with open(path, 'r', encoding='utf-8') as f:
                click.echo(f.read(), nl=False)
        click.echo(f"✓ Wrote {len(written)} reports to {directory.reports_dir}", err=True)
    except IntentGenError as e:
        logger.error(f"Report failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Report failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
