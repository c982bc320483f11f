#!/usr/bin/env python3
"""Energy curves m -> E_m for the two reference models.

    1D cubic (f = t^3): compared with the closed form -m^3/96.
    3D cubic-quintic above the critical mass: shape checks only.

Writes curve_<tag>.csv and curve_<tag>.dat under --out (default runs/curves).
"""
import argparse
import os

import numpy as np

from massmin import RadialGrid, SolverConfig, cubic_quintic, energy_curve, single_power
from massmin.cli import emit_plotdata, write_rows
from massmin.critical_mass import curve_properties

CASES = {
    "cubic1d": (single_power(4), 1, np.linspace(1.0, 6.0, 11), RadialGrid(1, 40.0, 8000),
                lambda m: -m**3 / 96),
    "cq3d": (cubic_quintic(), 3, np.linspace(250.0, 500.0, 6), RadialGrid(3, 40.0, 4000), None),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(os.environ.get("MASSMIN_OUTPUT", "runs"), "curves"))
    ap.add_argument("--case", choices=sorted(CASES), action="append")
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for tag in args.case or sorted(CASES):
        model, N, masses, grid, oracle = CASES[tag]
        rows = energy_curve(model, N, masses.tolist(), grid, SolverConfig(), args.workers)
        ref = [oracle(r.m) if oracle else float("nan") for r in rows]
        write_rows(os.path.join(args.out, f"curve_{tag}.csv"), ["m", "E", "mu", "E_ref", "status"],
                   [[r.m, r.E, r.mu, e, r.status] for r, e in zip(rows, ref)])
        sub = os.path.join(args.out, tag)
        emit_plotdata(rows, "curve", sub)
        rep = curve_properties(rows, N)
        print(f"{tag}: nonincreasing={rep.nonincreasing} concave={rep.concave} "
              f"subhomogeneous={rep.subhomogeneous}")
        for r, e in zip(rows, ref):
            print(f"  m={r.m:8.3f}  E={r.E:+.6e}  ref={e:+.6e}  mu={r.mu:.5f}")


if __name__ == "__main__":
    main()
