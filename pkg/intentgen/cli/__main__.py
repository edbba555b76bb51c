#!/usr/bin/env python3
"""Entry point for CLI module execution."""

from . import cli

if __name__ == "__main__":
    cli()
