"""Shared, cached builders for the fixture graphs, chains, pools and codes."""

from __future__ import annotations

from fractions import Fraction as F
from functools import lru_cache
from pathlib import Path

from wcc.concat import ConcatParams
from wcc.expurgate import build_bad_pair_graph, expurgate_greedy
from wcc.formats import sorted_codewords
from wcc.graph import LabeledGraph, load_graph, parse_graph
from wcc.markov import maxentropic_chain, quantize_n_integral, uniform_chain
from wcc.pool import PoolSpec, enumerate_pool

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@lru_cache(maxsize=None)
def graph(name: str) -> LabeledGraph:
    return load_graph(FIXTURES / f"{name}.graph")


@lru_cache(maxsize=None)
def chain(name: str):
    """Uniform chain for FB and DB2, maxentropic chain for GM."""
    g = graph(name)
    if name == "gm":
        return maxentropic_chain(g)[0]
    return uniform_chain(g)


@lru_cache(maxsize=None)
def spec(name: str, n: int, alpha=F(1, 2), zeta=F(1, 5), root: int = 0) -> PoolSpec:
    return PoolSpec(quantize_n_integral(chain(name), n), F(alpha), F(zeta), root)


@lru_cache(maxsize=None)
def pool(name: str, n: int, alpha=F(1, 2), zeta=F(1, 5), root: int = 0):
    return tuple(enumerate_pool(spec(name, n, alpha, zeta, root)))


# (fixture, n, zeta, eps, K) for the concatenation codes used across the suite
CONCAT_FIXTURES = {
    "db2": ("db2", 24, F(1, 10), F(1, 20), 3),
    "gm": ("gm", 20, F(1, 4), F(1, 10), 4),
}


@lru_cache(maxsize=None)
def concat_params(key: str, k: int | None = None) -> ConcatParams:
    name, n, zeta, eps, k0 = CONCAT_FIXTURES[key]
    sp = spec(name, n, F(1, 2), zeta)
    ec = expurgate_greedy(build_bad_pair_graph(pool(name, n, F(1, 2), zeta), sp, eps))
    g = graph(name)
    return ConcatParams(g, sp.root, tuple(sorted_codewords(g, ec.codewords)), k0 if k is None else k)


def single_loop_graph() -> LabeledGraph:
    return parse_graph("alphabet 0\nvertex v\nedge v v 0\n")
