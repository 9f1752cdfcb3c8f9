"""Main entrypoint for debias-lab."""
import sys

from debias.cli import main

if __name__ == "__main__":
    sys.exit(main())
