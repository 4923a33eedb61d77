#!/usr/bin/env python3
"""Tabulate the regularized-solution path a -> 0 across the gallery.

For each problem: the a * ||w_a|| monotonicity profile on a wide grid and
the continuation limit with its distance to the known solution (when one is
stored). Writes one CSV per problem.

Usage: python scripts/continuation_study.py [--out DIR] [--floor A]
"""

import argparse
from pathlib import Path

import numpy as np

import dsmflow as d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/continuation_study")
    ap.add_argument("--floor", type=float, default=1e-8)
    args = ap.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    grid = [10.0 * 0.5**k for k in range(20)]
    print(f"{'problem':22s} {'a_final':>10s} {'||y||':>10s} {'dist to known':>14s} {'monotone':>8s}")
    for name in d.GALLERY_NAMES:
        p = d.make_problem(name)
        sweep = d.lemma_2_1_sweep(p, grid)
        result = d.minimal_norm_limit(p, a_floor=args.floor)
        dist = (
            float(np.linalg.norm(result.y_estimate - p.minimal_norm_solution))
            if p.minimal_norm_solution is not None
            else float("nan")
        )
        print(
            f"{name:22s} {result.a_values[-1]:10.3e} "
            f"{float(np.linalg.norm(result.y_estimate)):10.4g} {dist:14.3e} "
            f"{str(sweep.monotone_nondecreasing_in_a):>8s}"
        )
        lines = ["a,norm_w,a_norm_w"]
        for a, w in zip(result.a_values, result.w_values):
            nw = float(np.linalg.norm(w))
            lines.append(f"{a:.16e},{nw:.16e},{a * nw:.16e}")
        (out_dir / f"{name}.csv").write_text("\n".join(lines) + "\n")
    print(f"\npaths written to {out_dir}")


if __name__ == "__main__":
    main()
