#!/usr/bin/env python3
"""Emit the exponential-bound curves (CSV + SVG) for nu = 3 and Ricci lower
bounds R in {-1, 0, 1} at theta = 1/6, explosion markers included.

Extra flags are passed through to `tubebound curves`.
"""
import sys

from tubebound.cli import main

if __name__ == "__main__":
    sys.exit(main(["curves", "--out", "results/curves", *sys.argv[1:]]))
