#!/usr/bin/env python3
"""Monte Carlo validation of every conditional-moment formula (z-scores)."""
import sys

from maintsim.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "moments", *sys.argv[1:]]))
