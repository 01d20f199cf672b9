#!/usr/bin/env python3
"""Constant-ratio sweep (lambda = T/C): simulation, theory, and the limit."""
import sys

from maintsim.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "fig6", *sys.argv[1:]]))
