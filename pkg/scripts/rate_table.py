"""Finite-length pool rates and asymptotic error-correcting rates for the fixture graphs.

Usage: python3 scripts/rate_table.py [--out table.csv]
"""

import argparse
import csv
import sys
from fractions import Fraction

from _fixtures import fixture_chain
from wcc.bounds import collision_and_distance
from wcc.counting import pool_rate
from wcc.ldp import rates_at_target
from wcc.markov import entropy_rate, maxentropic_chain, quantize_n_integral
from wcc.pool import PoolSpec

FIELDS = ["graph", "capacity", "entropy", "expected_distance", "n", "alpha", "R_pool_lower",
          "eps", "R1", "R2", "R_ec", "delta_code"]


def rows(alpha, ns, eps_grid, zeta):
    for name in ("fb", "db2", "gm"):
        ch = fixture_chain(name)
        cap = maxentropic_chain(ch.graph)[1]
        h = entropy_rate(ch)
        dist = float(collision_and_distance(ch)[1])
        z_pool = ch.p_min * (1 - alpha) / alpha / 2
        for n in ns:
            r = pool_rate(PoolSpec(quantize_n_integral(ch, n), alpha, z_pool, 0))
            for eps in eps_grid:
                rr = rates_at_target(ch, float(alpha), dist - eps, zeta)
                yield dict(graph=name, capacity=f"{cap:.6f}", entropy=f"{h:.6f}", expected_distance=f"{dist:.6f}",
                           n=n, alpha=str(alpha), R_pool_lower=f"{r.rate_lower:.6f}", eps=eps,
                           R1=f"{rr.r1:.6f}", R2=f"{rr.r2:.6f}", R_ec=f"{rr.r_ec:.6f}",
                           delta_code=f"{rr.delta_code:.6f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--zeta", type=float, default=0.0, help="band width used in the asymptotic rates")
    ap.add_argument("--out")
    args = ap.parse_args()
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=FIELDS)
    w.writeheader()
    for row in rows(args.alpha, (10**3, 10**4), (0.05, 0.1, 0.2), args.zeta):
        w.writerow(row)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
