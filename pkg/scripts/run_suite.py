#!/usr/bin/env python3
"""Full verification suite on a few reference instances; exits 3 on any failure."""
import os
import sys

from massmin import RadialGrid, SolverConfig, cubic_quintic, single_power
from massmin.verification import exit_status, run_suite, summary_table, write_verdicts_csv

INSTANCES = [
    ("cubic_1d", single_power(4), 1, 4.0, RadialGrid(1, 20.0, 4000)),
    ("cq_1d", cubic_quintic(), 1, 2.0, RadialGrid(1, 60.0, 12000)),
    ("p3_2d", single_power(3), 2, 10.0, RadialGrid(2, 20.0, 4000)),
]


def main():
    out = os.path.join(os.environ.get("MASSMIN_OUTPUT", "runs"), "suite")
    os.makedirs(out, exist_ok=True)
    status = 0
    for tag, model, N, m, grid in INSTANCES:
        verdicts = run_suite(model, N, m, grid, SolverConfig(width=3.0 if tag == "cq_1d" else 1.0))
        write_verdicts_csv(verdicts, os.path.join(out, f"{tag}.csv"))
        print(f"== {tag}")
        print(summary_table(verdicts))
        status = max(status, exit_status(verdicts))
    return status


if __name__ == "__main__":
    sys.exit(main())
