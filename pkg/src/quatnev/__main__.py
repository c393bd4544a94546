"""Module entry point: python -m quatnev."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
