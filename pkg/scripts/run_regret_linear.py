#!/usr/bin/env python3
"""Monte Carlo Bayesian regret for a random linear-binary instance,
overlaid with the closed-form d*sqrt(T log(3 + 3 sqrt(2T)/d)) ceiling.

Exit code 1 if the final cumulative regret exceeds the bound.
"""

import sys

from rdts.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "regret",
                "--model", "linear_binary",
                "--d", "3",
                "--n", "30",
                "--m", "30",
                "--T", "500",
                "--runs", "300",
                "--seed", "20240817",
                "--out", "regret_linear.csv",
                *sys.argv[1:],
            ]
        )
    )
