#!/usr/bin/env python3
"""Scenario evaluation command."""

import json
import sys

import click

from ...harness import eval_stage, format_percent
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger
from . import config_option, load_context, max_workers, run_dir_option, split_list

logger = get_logger(__name__)


@click.command()
@config_option
@run_dir_option
@click.option('--scenarios', help='Comma-separated scenarios: u1,u2,u3,gen3,gen5x,rnd3')
@click.option('--split', type=click.Choice(['test', 'dev']), help='Evaluation split')
@click.option('--generator', 'generators', multiple=True, help='Generator model for look-ahead; repeatable')
@click.option('--samples', type=click.IntRange(min=1), help='Generated alternatives for gen5x')
@click.option('--format', 'output_format', type=click.Choice(['text', 'json']), default='text',
              help='Output format')
def evaluate(config_path, run_dir, scenarios, split, generators, samples, output_format):
    """
    Evaluate trained models under the truncated and look-ahead scenarios.

    Example:
        intentgen eval --run-dir runs/edu --scenarios u1,u2,u3,gen5x --generator ALL_SDC
    """
    try:
        overrides = {'inference': {
            'scenarios': split_list(scenarios),
            'split': split,
            'generators': list(generators) or None,
            'gen5x_samples': samples,
        }}
        settings, directory = load_context(config_path, run_dir, overrides)
        results = eval_stage(directory, settings, max_workers())

        if output_format == 'json':
            click.echo(json.dumps([r.to_dict() for r in results], indent=2))
            return
        click.echo(f"✓ Evaluated {len({r.model for r in results})} models on {settings.inference.split}")
        for r in results:
            generator = f" [{r.generator}]" if r.generator else ""
            click.echo(f"  {r.model} {r.scenario}{generator}: {r.t}/{r.d} = {format_percent(r.t, r.d)}%")
    except IntentGenError as e:
        logger.error(f"Evaluation failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.error(f"Evaluation failed: {e}", exc_info=True)
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
