"""Main entry point for the nag-lab command line."""

import sys

from src.cli.runner import main

__all__ = ["main"]


if __name__ == "__main__":
    sys.exit(main())
