#!/usr/bin/env python3
"""Error vs localization count for MAINT and MADRD on shared trajectories."""
import sys

from maintsim.cli import main

if __name__ == "__main__":
    sys.exit(main(["simulate", "fig4", *sys.argv[1:]]))
