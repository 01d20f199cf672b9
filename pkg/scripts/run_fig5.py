#!/usr/bin/env python3
"""Period sweep: simulated mean squared error vs the closed-form average."""
import sys

from maintsim.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "fig5", *sys.argv[1:]]))
