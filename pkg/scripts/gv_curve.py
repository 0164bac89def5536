"""Asymptotic rate R1 on the full binary shift against the Gilbert-Varshamov curve 1 - h2(delta).

With a single-vertex graph, alpha = 1 and zeta = 0 the two coincide for
delta <= 1/2; the script prints both and their difference.

Usage: python3 scripts/gv_curve.py [--points 11] [--out gv.csv]
"""

import argparse
import csv
import math
import sys

from _fixtures import fixture_chain
from wcc.ldp import rates_at_target


def h2(p):
    return 0.0 if p in (0.0, 1.0) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--out")
    args = ap.parse_args()
    ch = fixture_chain("fb")
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["delta", "R1", "gv", "difference"])
    for k in range(args.points):
        delta = 0.5 * k / (args.points - 1)
        r1 = rates_at_target(ch, 1.0, delta, 0.0).r1
        gv = 1 - h2(delta)
        w.writerow([f"{delta:.4f}", f"{r1:.6f}", f"{gv:.6f}", f"{r1 - gv:.2e}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
