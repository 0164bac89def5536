"""Substitution-channel performance of a concatenated code built from a fixture graph.

Builds the pool, expurgates it greedily, concatenates with a Reed-Solomon
outer code and sweeps the substitution probability.

Usage: python3 scripts/channel_sim.py [--graph db2] [--trials 2000] [--out sim.csv]
"""

import argparse
import csv
import math
import sys
from fractions import Fraction

from _fixtures import fixture_chain
from wcc.channel import ChannelModel, binomial_tail, simulate_channel
from wcc.concat import ConcatParams
from wcc.expurgate import build_bad_pair_graph, expurgate_greedy
from wcc.formats import sorted_codewords
from wcc.markov import quantize_n_integral
from wcc.pool import PoolSpec, enumerate_pool

# (n, zeta, eps, K) per graph
CODES = {
    "db2": (24, Fraction(1, 10), Fraction(1, 20), 3),
    "gm": (20, Fraction(1, 4), Fraction(1, 10), 4),
}


def build(name):
    n, zeta, eps, k = CODES[name]
    ch = fixture_chain(name)
    spec = PoolSpec(quantize_n_integral(ch, n), Fraction(1, 2), zeta, 0)
    code = expurgate_greedy(build_bad_pair_graph(enumerate_pool(spec), spec, eps))
    return ConcatParams(ch.graph, 0, tuple(sorted_codewords(ch.graph, code.codewords)), k)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--graph", choices=sorted(CODES), default="db2")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    cp = build(args.graph)
    print(" | ".join(cp.lines()), file=sys.stderr)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["p", "message_error_rate", "inner_failure_rate", "binomial_tail", "guaranteed_fraction",
                "guaranteed_violations"])
    for p in (0.0, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2):
        rep = simulate_channel(cp, ChannelModel(p), args.trials, seed=args.seed)
        tail = binomial_tail(cp.n, p, math.ceil(cp.d_in / 2))
        w.writerow([p, f"{rep.message_error_rate:.5f}", f"{rep.inner_failure_rate:.5f}", f"{tail:.5f}",
                    f"{rep.guaranteed_trials / rep.trials:.5f}", rep.guaranteed_violations])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
