#!/usr/bin/env python3
"""Synthetic corpus command."""

import sys

import click

from ...corpus import serialize_dialogues, synth_edu
from ...utils.errors import IntentGenError
from ...utils.logging import get_logger

logger = get_logger(__name__)


@click.command()
@click.option('--intents', default=115, type=int, help='Number of distinct intents (default: 115)')
@click.option('--windows', default=2063, type=int, help='Number of dialogues, one window each (default: 2063)')
@click.option('--seed', default=13, type=int, help='Random seed (default: 13)')
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='Output canonical JSONL file')
def synth(intents, windows, seed, out):
    """
    Write a synthetic customer-support corpus in the canonical format.

    Example:
        intentgen synth --intents 115 --windows 2063 --out data/edu.jsonl
    """
    try:
        dialogues = synth_edu(intents, windows, seed)
        count = serialize_dialogues(dialogues, out)
        escalated = sum(1 for d in dialogues if d.escalated)
        click.echo(f"✓ Wrote {count} dialogues to {out}")
        click.echo(f"  Escalated: {escalated}")
        logger.info(f"CLI synth: {count} dialogues, {intents} intents, seed {seed}")
    except IntentGenError as e:
        logger.error(f"Synth failed: {e}")
        click.echo(f"✗ Error: {e}", err=True)
        sys.exit(1)
