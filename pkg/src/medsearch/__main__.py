"""
Entry point for medsearch.

Run with: python -m medsearch <command>
Or: medsearch <command> (if installed as package)
"""

import sys


def main() -> int:
    """Main entry point."""
    from .cli import run_cli
    return run_cli()


if __name__ == "__main__":
    sys.exit(main())
