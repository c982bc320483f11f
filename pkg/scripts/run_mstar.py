#!/usr/bin/env python3
"""Critical mass of the cubic-quintic model in N = 2 and N = 3.

The N = 2 value is compared against the Townes mass 11.7009, which is a
lower bound (sharp Gagliardo-Nirenberg for the quartic part).
"""
import argparse
import os
import time

from massmin import RadialGrid, SolverConfig, cubic_quintic
from massmin.critical_mass import HISTORY_FIELDS, estimate_mstar
from massmin.cli import write_rows

BRACKETS = {2: (5.0, 40.0), 3: (0.1, 200.0)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[3])
    ap.add_argument("--tol-mass", type=float, default=1e-2)
    ap.add_argument("--R", type=float, default=40.0)
    ap.add_argument("--M", type=int, default=4000)
    ap.add_argument("--out", default=os.path.join(os.environ.get("MASSMIN_OUTPUT", "runs"), "mstar"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for N in args.dims:
        t0 = time.perf_counter()
        est = estimate_mstar(cubic_quintic(), N, BRACKETS.get(N, (0.1, 200.0)), args.tol_mass,
                             RadialGrid(N, args.R, args.M), SolverConfig(restarts=4))
        write_rows(os.path.join(args.out, f"mstar_N{N}.csv"), HISTORY_FIELDS, est.history)
        print(f"N={N}: {est.classification}  m* in [{est.lower:.5f}, {est.upper:.5f}]  "
              f"E(upper)={est.E_upper:.3e}  ({time.perf_counter() - t0:.1f}s)")
        if N == 2:
            print("  Townes mass lower bound 11.7009")


if __name__ == "__main__":
    main()
