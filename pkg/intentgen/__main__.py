#!/usr/bin/env python3
"""Entry point for ``python -m intentgen``."""

from .cli import cli


def main():
    cli()


if __name__ == "__main__":
    main()
