#!/usr/bin/env python3
"""Mountain-pass paths in N = 1, 2, 3 for a chosen model and frequency."""
import argparse
import os

from massmin.cli import emit_plotdata, resolve_model
from massmin.mp_path import check_path_result, segment_pattern, write_path_csv
from massmin.verification import witness_path


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="single-power:p=3")
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--samples", type=int, default=64)
    ap.add_argument("--out", default=os.path.join(os.environ.get("MASSMIN_OUTPUT", "runs"), "paths"))
    args = ap.parse_args()
    model = resolve_model(args.model)
    for N in args.dims:
        path, _ = witness_path(model, N, args.mu, args.samples)
        sub = os.path.join(args.out, f"N{N}")
        os.makedirs(sub, exist_ok=True)
        write_path_csv(path, os.path.join(sub, "path.csv"))
        emit_plotdata(path.samples, "path", sub)
        rep = check_path_result(path)
        extra = f" segments {segment_pattern(path)}" if path.kind == "two-param" else ""
        print(f"N={N} {path.kind}: J(w)={path.J_w:.6f} T={path.T:.4g} passed={rep.passed}{extra}")
        for r in rep.reasons:
            print("  ", r)


if __name__ == "__main__":
    main()
