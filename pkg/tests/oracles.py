"""Independent reference computations used to freeze expected values.

Nothing here calls into the package's algorithms; only graph/chain data
structures are read.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache


def brute_force_count(graph, per_edge, u, v):
    """Walk count from u to v using each edge exactly per_edge[e] times."""

    @lru_cache(maxsize=None)
    def rec(cur, remaining):
        if not any(remaining):
            return int(cur == v)
        total = 0
        for e in graph.edges:
            if e.src == cur and remaining[e.id]:
                nxt = list(remaining)
                nxt[e.id] -= 1
                total += rec(e.dst, tuple(nxt))
        return total

    return rec(u, tuple(per_edge))


def all_eulerian_paths(graph, multiplicity, start, end):
    """Every edge sequence from start to end using edge e exactly multiplicity[e] times."""
    out = []

    def rec(cur, remaining, acc):
        if not any(remaining):
            if cur == end:
                out.append(tuple(acc))
            return
        for e in graph.edges:
            if e.src == cur and remaining[e.id]:
                remaining[e.id] -= 1
                acc.append(e.id)
                rec(e.dst, remaining, acc)
                acc.pop()
                remaining[e.id] += 1

    rec(start, list(multiplicity), [])
    return out


def lex_key(graph, path):
    return tuple((graph.edges[e].label, graph.edges[e].dst, e) for e in path)


def all_walks(graph, start, length):
    """All edge sequences of the given length leaving start."""
    walks = [((), start)]
    for _ in range(length):
        walks = [(p + (e.id,), e.dst) for p, v in walks for e in graph.edges if e.src == v]
    return [p for p, _ in walks]


def brute_force_pool(graph, probs, counts, alpha, zeta, root):
    """Label sequences of the pool, built from the definition on every length-n' walk.

    A prefix is kept when every edge frequency lies strictly inside the
    band ``P(e) +- zeta``, every leftover multiplicity is positive and the
    leftovers admit a walk back to ``root``; the completion is the minimum of all such walks.
    """
    n = sum(counts)
    npr = math.floor(alpha * n)
    words = []
    for path in all_walks(graph, root, npr):
        s = [0] * graph.num_edges
        for e in path:
            s[e] += 1
        if any(abs(Fraction(s[e], npr) - probs[e]) >= zeta for e in range(graph.num_edges)):
            continue
        resid = [c - x for c, x in zip(counts, s)]
        if min(resid) < 1:
            continue
        end = graph.edges[path[-1]].dst if path else root
        tails = all_eulerian_paths(graph, resid, end, root)
        if not tails:
            continue
        tail = min(tails, key=lambda p: lex_key(graph, p))
        words.append(tuple(graph.edges[e].label for e in path + tail))
    return sorted(words)


def poly_eval_codeword(msg, q, g):
    """Evaluations of ``sum_i msg[i] x^i`` at ``g^0 .. g^(q-2)`` modulo q."""
    return tuple(sum(c * pow(g, i * j, q) for i, c in enumerate(msg)) % q for j in range(q - 1))


def min_hamming(words):
    return min(sum(a != b for a, b in zip(x, y)) for x, y in itertools.combinations(words, 2))


def h2(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


GOLDEN = (1 + math.sqrt(5)) / 2
