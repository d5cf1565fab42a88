#!/usr/bin/env python3
"""Audit the compressed-regret inequality chain on a small linear instance.

Prints the per-period check results as JSON; exit code 1 if any inequality
fails or the simulated regret exceeds the compressed bound.
"""

import sys

from rdts.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "audit",
                "--model", "linear_binary",
                "--d", "2",
                "--n", "10",
                "--m", "8",
                "--T", "10",
                "--runs", "3",
                "--epsilon", "0.2",
                "--seed", "20240817",
                *sys.argv[1:],
            ]
        )
    )
