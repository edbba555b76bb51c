#!/usr/bin/env python3
"""Command-line interface for intentgen."""

import click

from .. import __version__
from ..config import get_config
from ..utils.logging import get_logger

logger = get_logger(__name__)


@click.group()
@click.version_option(version=__version__, prog_name="intentgen")
@click.pass_context
def cli(ctx):
    """
    intentgen - intent prediction with look-ahead utterance generation.

    Each verb runs one pipeline stage against a run directory; `run`
    executes the whole pipeline from a configuration file and resumes
    interrupted runs.

    Examples:
        \b
        # Full pipeline on the synthetic corpus with the oracle backend
        intentgen run --config configs/oracle_smoke.yaml

        # Split MultiWOZ 2.2 into the published split sizes
        intentgen prep --format multiwoz --input data/multiwoz --name multiwoz \\
            --sizes 2538,1012,211,233 --run-dir runs/multiwoz

        # Render the report tables of a finished run
        intentgen report --run-dir runs/multiwoz
    """
    ctx.ensure_object(dict)
    ctx.obj['config'] = get_config()


def _register_commands():
    """Register CLI commands."""
    try:
        from .commands.prep import prep as prep_cmd
        from .commands.synth import synth as synth_cmd
        from .commands.build_tasks import build_tasks as build_tasks_cmd
        from .commands.weaklabel import weaklabel as weaklabel_cmd
        from .commands.train import train as train_cmd
        from .commands.sweep import sweep as sweep_cmd
        from .commands.ablate import ablate as ablate_cmd
        from .commands.evaluate import evaluate as eval_cmd
        from .commands.conflicts import conflicts as conflicts_cmd
        from .commands.report import report as report_cmd
        from .commands.run import run as run_cmd

        cli.add_command(prep_cmd, name="prep")
        cli.add_command(synth_cmd, name="synth")
        cli.add_command(build_tasks_cmd, name="build-tasks")
        cli.add_command(weaklabel_cmd, name="weaklabel")
        cli.add_command(train_cmd, name="train")
        cli.add_command(sweep_cmd, name="sweep")
        cli.add_command(ablate_cmd, name="ablate")
        cli.add_command(eval_cmd, name="eval")
        cli.add_command(conflicts_cmd, name="conflicts")
        cli.add_command(report_cmd, name="report")
        cli.add_command(run_cmd, name="run")
    except ImportError as e:
        logger.error(f"Failed to import CLI commands: {e}")
        raise


_register_commands()


if __name__ == "__main__":
    cli()
