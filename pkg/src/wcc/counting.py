"""Exact path counts from transition counts, and pool-size lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import cofactor
from .graph import LabeledGraph
from .markov import MarkovChain, entropy_rate, maxentropic_chain

LOG2E = math.log2(math.e)


class CountingError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionCounts:
    graph: LabeledGraph
    per_edge: tuple[int, ...]

    def __post_init__(self):
        if len(self.per_edge) != self.graph.num_edges:
            raise CountingError("one count per edge required")
        if any(c < 0 for c in self.per_edge):
            raise CountingError("negative transition count")

    @property
    def out_totals(self) -> list[int]:
        f = [0] * self.graph.num_vertices
        for e, c in zip(self.graph.edges, self.per_edge):
            f[e.src] += c
        return f

    @property
    def in_totals(self) -> list[int]:
        f = [0] * self.graph.num_vertices
        for e, c in zip(self.graph.edges, self.per_edge):
            f[e.dst] += c
        return f

    def vertex_matrix(self) -> list[list[int]]:
        nv = self.graph.num_vertices
        f = [[0] * nv for _ in range(nv)]
        for e, c in zip(self.graph.edges, self.per_edge):
            f[e.src][e.dst] += c
        return f

    def satisfies_flow(self, u: int, v: int) -> bool:
        out, inn = self.out_totals, self.in_totals
        return all(out[i] - inn[i] == (i == u) - (i == v) for i in range(self.graph.num_vertices))


def _cofactor_matrix(f: Sequence[Sequence[Fraction]], out: Sequence[Fraction]) -> list[list[Fraction]]:
    nv = len(f)
    return [
        [Fraction(int(i == j)) - (Fraction(f[i][j]) / out[i] if out[i] else 0) for j in range(nv)]
        for i in range(nv)
    ]


def whittle_count(tc: TransitionCounts, u: int, v: int) -> int:
    """Number of edge sequences from ``u`` to ``v`` using each edge exactly ``per_edge`` times."""
    if not tc.satisfies_flow(u, v):
        raise CountingError(f"transition counts violate the flow condition for endpoints ({u}, {v})")
    if sum(tc.per_edge) == 0:
        return 1
    out = tc.out_totals
    fstar = _cofactor_matrix(tc.vertex_matrix(), out)
    num = 1
    for x in out:
        num *= math.factorial(x)
    den = 1
    for c in tc.per_edge:
        den *= math.factorial(c)
    value = Fraction(num, den) * cofactor(fstar, v, u)
    if value.denominator != 1:
        raise AssertionError(f"path count {value} is not an integer")
    return int(value)


@dataclass(frozen=True)
class PoolSizeBound:
    log2_lower: float
    entropy_term: float
    stirling_term: float
    delta_term: float
    terminal_term: float
    per_vertex_c: tuple[float | None, ...]
    terminals: tuple[int, ...]
    log2_lower_all_terminals: float | None
    log2_lgamma_count: float | None
    n_prime: int

    @property
    def components_sum(self) -> float:
        return self.entropy_term + self.stirling_term + self.delta_term + self.terminal_term


def _log2_sum_exp2(xs: Sequence[float]) -> float:
    m = max(xs)
    return m + math.log2(sum(2.0 ** (x - m) for x in xs))


def log2_count_bound(chain: MarkovChain, n_prime: int, root: int) -> PoolSizeBound:
    """Stirling lower bound on the log2 number of length-``n_prime`` walks from ``root``
    with counts ``n_prime P(e)``.

    The stationary count vector is balanced, so such walks are closed and only
    the terminal ``root`` carries a count; the sum over every terminal vertex
    is reported separately as ``log2_lower_all_terminals``.
    """
    g = chain.graph
    if not chain.full_support:
        raise CountingError("pool-size bound needs P(e) > 0 on every edge")
    if n_prime < 1:
        raise CountingError("prefix length must be positive")
    pi = chain.pi
    nv, ne = g.num_vertices, g.num_edges
    h = entropy_rate(chain)
    entropy_term = n_prime * h
    stirling_term = (nv - ne) / 2 * math.log2(2 * math.pi * n_prime)
    delta_term = LOG2E * (
        sum(1 / (12 * n_prime * float(p) + 1) for p in pi)
        - sum(1 / (12 * n_prime * float(p)) for p in chain.edge_prob)
    )
    base_c = 0.5 * (sum(math.log2(float(p)) for p in pi) - sum(math.log2(float(p)) for p in chain.edge_prob))
    fstar = _cofactor_matrix(chain.flow_matrix(), pi)
    per_vertex: list[float | None] = []
    for v in range(nv):
        cf = cofactor(fstar, v, root)
        per_vertex.append(base_c + math.log2(cf) if cf > 0 else None)
    if per_vertex[root] is None:
        raise CountingError("cofactor at the root is not positive")
    terminal_term = per_vertex[root]
    head = entropy_term + stirling_term + delta_term
    live = [c for c in per_vertex if c is not None]
    all_terms = head + _log2_sum_exp2(live) if live else None

    lg = sum(math.lgamma(n_prime * float(p) + 1) for p in pi)
    lg -= sum(math.lgamma(n_prime * float(p) + 1) for p in chain.edge_prob)
    cf_root = cofactor(fstar, root, root)
    log2_lgamma = lg * LOG2E + math.log2(cf_root)

    return PoolSizeBound(
        log2_lower=head + terminal_term,
        entropy_term=entropy_term,
        stirling_term=stirling_term,
        delta_term=delta_term,
        terminal_term=terminal_term,
        per_vertex_c=tuple(per_vertex),
        terminals=(root,),
        log2_lower_all_terminals=all_terms,
        log2_lgamma_count=log2_lgamma,
        n_prime=n_prime,
    )


def pool_size_bound(spec) -> PoolSizeBound:
    return log2_count_bound(spec.chain, spec.n_prime, spec.root)


@dataclass(frozen=True)
class PoolRate:
    rate_lower: float
    alpha_entropy: float
    entropy: float
    capacity: float
    alpha_capacity: float
    n: int


def rate_from_bound(bound: PoolSizeBound, n: int, alpha, chain: MarkovChain) -> PoolRate:
    h = entropy_rate(chain)
    _, cap = maxentropic_chain(chain.graph)
    a = float(alpha)
    return PoolRate(bound.log2_lower / n, a * h, h, cap, a * cap, n)


def pool_rate(spec) -> PoolRate:
    """Finite-length rate lower bound with its asymptotic targets ``alpha H`` and ``alpha cap``."""
    return rate_from_bound(pool_size_bound(spec), spec.n, spec.alpha, spec.chain)

