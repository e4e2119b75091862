#!/usr/bin/env python3
"""Monte Carlo vs bound on hyperbolic 3-space: second radial moment at
t = 1 with 10^5 exact endpoint draws.

Extra flags are passed through to `tubebound mc` (and override these).
"""
import sys

from tubebound.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            ["mc", "--scenario", "h3", "--kappa", "-1", "--t", "1", "--p", "1",
             "--n", "100000", "--out", "results/mc", *sys.argv[1:]]
        )
    )
