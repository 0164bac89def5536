"""Stationary Markov chains on labeled graphs.

Edge probabilities are exact :class:`~fractions.Fraction` values so that
stationarity, reversibility and integrality can be decided without rounding.
Spectral quantities are computed in floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import exact
from .graph import GraphError, LabeledGraph, validate_graph

__all__ = [
    "ChainError",
    "MarkovChain",
    "IntegralChain",
    "GapReport",
    "parse_chain",
    "format_chain",
    "uniform_chain",
    "stationary_distribution",
    "entropy_rate",
    "maxentropic_chain",
    "quantize_n_integral",
    "spectral_gaps",
]

EIG_TOL = 1e-10
# Common denominator used when rationalizing a floating-point chain.
RATIONAL_GRID = 10**15
QUANTIZE_SEARCH_LIMIT = 10**6


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class MarkovChain:
    graph: LabeledGraph
    edge_prob: tuple[Fraction, ...]

    def __post_init__(self):
        g = self.graph
        if len(self.edge_prob) != g.num_edges:
            raise ChainError("one probability per edge required")
        probs = tuple(Fraction(p) for p in self.edge_prob)
        object.__setattr__(self, "edge_prob", probs)
        if any(p < 0 for p in probs):
            raise ChainError("negative edge probability")
        if sum(probs) != 1:
            raise ChainError(f"edge probabilities sum to {sum(probs)}, not 1")
        out = [Fraction(0)] * g.num_vertices
        inn = [Fraction(0)] * g.num_vertices
        for e, p in zip(g.edges, probs):
            out[e.src] += p
            inn[e.dst] += p
        for v in range(g.num_vertices):
            if out[v] != inn[v]:
                raise ChainError(
                    f"chain is not stationary at vertex {g.vertices[v]!r}: "
                    f"outflow {out[v]} != inflow {inn[v]}"
                )

    @cached_property
    def pi(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.graph.num_vertices
        for e, p in zip(self.graph.edges, self.edge_prob):
            out[e.src] += p
        return tuple(out)

    def trans(self, eid: int) -> Fraction:
        """``p(tau(e) | sigma(e))`` for edge ``eid``."""
        mass = self.pi[self.graph.edges[eid].src]
        return self.edge_prob[eid] / mass if mass else Fraction(0)

    @cached_property
    def trans_probs(self) -> tuple[Fraction, ...]:
        return tuple(self.trans(e) for e in range(self.graph.num_edges))

    @property
    def p_min(self) -> Fraction:
        return min(self.edge_prob)

    @property
    def full_support(self) -> bool:
        return all(p > 0 for p in self.edge_prob)

    def flow_matrix(self) -> list[list[Fraction]]:
        """Vertex-level edge measure ``F[u][v] = sum of P(e) over edges u -> v``."""
        nv = self.graph.num_vertices
        f = [[Fraction(0)] * nv for _ in range(nv)]
        for e, p in zip(self.graph.edges, self.edge_prob):
            f[e.src][e.dst] += p
        return f

    def transition_matrix(self) -> np.ndarray:
        nv = self.graph.num_vertices
        t = np.zeros((nv, nv))
        for e in self.graph.edges:
            t[e.src, e.dst] += float(self.trans(e.id))
        return t

    @cached_property
    def reversible(self) -> bool:
        f = self.flow_matrix()
        n = len(f)
        return all(f[u][v] == f[v][u] for u in range(n) for v in range(u + 1, n))


@dataclass(frozen=True)
class IntegralChain:
    n: int
    counts: tuple[int, ...]
    parent: MarkovChain

    def __post_init__(self):
        g = self.parent.graph
        if len(self.counts) != g.num_edges:
            raise ChainError("one count per edge required")
        if any(c < 0 for c in self.counts):
            raise ChainError("negative count")
        if sum(self.counts) != self.n:
            raise ChainError(f"counts sum to {sum(self.counts)}, expected {self.n}")
        out = [0] * g.num_vertices
        inn = [0] * g.num_vertices
        for e, c in zip(g.edges, self.counts):
            out[e.src] += c
            inn[e.dst] += c
        if out != inn:
            raise ChainError("counts are not vertex-balanced")

    @property
    def graph(self) -> LabeledGraph:
        return self.parent.graph

    def as_chain(self) -> MarkovChain:
        """The n-integral chain ``m(e)/n`` itself."""
        return MarkovChain(self.graph, tuple(Fraction(c, self.n) for c in self.counts))

    def max_deviation(self) -> Fraction:
        return max(abs(Fraction(c, self.n) - p) for c, p in zip(self.counts, self.parent.edge_prob))

    def scaled(self, k: int) -> "IntegralChain":
        return IntegralChain(self.n * k, tuple(c * k for c in self.counts), self.parent)


# ---------------------------------------------------------------------------
# Construction and file format


def _parse_rational(tok: str) -> Fraction:
    if "/" not in tok:
        if not tok.lstrip("-").isdigit():
            raise ChainError(f"expected a rational num/den, got {tok!r}")
    try:
        num, _, den = tok.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    except (ValueError, ZeroDivisionError):
        raise ChainError(f"expected a rational num/den, got {tok!r}") from None


def parse_chain(text: str, graph: LabeledGraph, require_full_support: bool = True) -> MarkovChain:
    probs: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] != "prob" or len(tok) != 5:
            raise ChainError(f"line {lineno}: expected 'prob <src> <dst> <label> <num>/<den>'")
        try:
            src, dst, lab = graph.vertex_id(tok[1]), graph.vertex_id(tok[2]), graph.symbol_id(tok[3])
        except GraphError as exc:
            raise ChainError(f"line {lineno}: {exc}") from None
        eid = graph.edge_from(src, lab)
        if eid is None or graph.edges[eid].dst != dst:
            raise ChainError(f"line {lineno}: no edge {tok[1]} -> {tok[2]} labeled {tok[3]}")
        if eid in probs:
            raise ChainError(f"line {lineno}: edge listed twice")
        probs[eid] = _parse_rational(tok[4])
    missing = [e for e in range(graph.num_edges) if e not in probs]
    if missing and require_full_support:
        raise ChainError(f"edges without probability: {missing}")
    return MarkovChain(graph, tuple(probs.get(e, Fraction(0)) for e in range(graph.num_edges)))


def format_chain(chain: MarkovChain) -> str:
    g = chain.graph
    lines = [
        f"prob {g.vertices[e.src]} {g.vertices[e.dst]} {g.alphabet[e.label]} "
        f"{p.numerator}/{p.denominator}"
        for e, p in zip(g.edges, chain.edge_prob)
    ]
    return "\n".join(lines) + "\n"


def uniform_chain(g: LabeledGraph) -> MarkovChain:
    """``P(e) = 1/|E|``; stationary exactly when ``g`` is balanced."""
    return MarkovChain(g, (Fraction(1, g.num_edges),) * g.num_edges)


def _rationalize(g: LabeledGraph, probs: Sequence[float]) -> tuple[Fraction, ...]:
    """Nearest exact stationary rational chain to a floating-point edge measure.

    Rounds onto a fixed grid, then projects orthogonally onto the affine space
    ``{sum P = 1, balanced}`` in exact arithmetic.
    """
    p0 = [Fraction(round(p * RATIONAL_GRID), RATIONAL_GRID) for p in probs]
    rows = [[Fraction(1)] * g.num_edges]
    rhs = [Fraction(1)]
    # One balance equation is redundant for a connected graph.
    for v in range(1, g.num_vertices):
        row = [Fraction(0)] * g.num_edges
        for e in g.edges:
            if e.src == v:
                row[e.id] += 1
            if e.dst == v:
                row[e.id] -= 1
        rows.append(row)
        rhs.append(Fraction(0))
    resid = [sum(a * x for a, x in zip(row, p0)) - b for row, b in zip(rows, rhs)]
    gram = [[sum(a * b for a, b in zip(r1, r2)) for r2 in rows] for r1 in rows]
    w = exact.solve(gram, resid)
    p = [x - sum(rows[i][e] * w[i] for i in range(len(rows))) for e, x in enumerate(p0)]
    if any(x <= 0 for x in p):
        raise ChainError("rationalized chain lost positivity")
    return tuple(p)


def stationary_distribution(chain: MarkovChain) -> tuple[Fraction, ...]:
    """Exact vertex distribution ``pi(u) = sum_{sigma(e)=u} P(e)``."""
    return chain.pi


def entropy_rate(chain: MarkovChain) -> float:
    """Entropy rate in bits per symbol."""
    h = 0.0
    for eid, p in enumerate(chain.edge_prob):
        if p > 0:
            h -= float(p) * math.log2(float(chain.trans(eid)))
    return h


def maxentropic_chain(g: LabeledGraph) -> tuple[MarkovChain, float]:
    """Parry measure of an irreducible graph, and the capacity ``log2`` of its Perron value.

    The returned chain is the exact rational stationary chain closest to the
    floating-point Parry measure (error ~1e-15 per edge).
    """
    if not validate_graph(g).irreducible:
        raise ChainError("maxentropic chain requires an irreducible graph")
    a = g.adjacency().astype(float)
    vals, right = np.linalg.eig(a)
    k = int(np.argmax(vals.real))
    lam = float(vals[k].real)
    x = np.abs(right[:, k].real)
    lvals, left = np.linalg.eig(a.T)
    y = np.abs(left[:, int(np.argmax(lvals.real))].real)
    # a few power steps polish the eigenvectors
    for _ in range(3):
        x = a @ x / lam
        x /= x.sum()
        y = a.T @ y / lam
        y /= y.sum()
    pi = x * y / float(x @ y)
    probs = [pi[e.src] * x[e.dst] / (lam * x[e.src]) for e in g.edges]
    chain = MarkovChain(g, _rationalize(g, probs))
    return chain, math.log2(lam)


# ---------------------------------------------------------------------------
# n-integral quantization


def _cycle_basis(g: LabeledGraph) -> tuple[list[int], np.ndarray]:
    """Non-tree edges and the integer matrix mapping their counts to all edge counts."""
    parent_edge: list[int | None] = [None] * g.num_vertices
    parent: list[int | None] = [None] * g.num_vertices
    depth = [0] * g.num_vertices
    seen = [False] * g.num_vertices
    tree: set[int] = set()
    for root in range(g.num_vertices):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            v = stack.pop()
            for eid in g.out_edges[v] + g.in_edges[v]:
                e = g.edges[eid]
                w = e.dst if e.src == v else e.src
                if not seen[w]:
                    seen[w] = True
                    parent[w], parent_edge[w], depth[w] = v, eid, depth[v] + 1
                    tree.add(eid)
                    stack.append(w)
    free = [e.id for e in g.edges if e.id not in tree]
    coef = np.zeros((g.num_edges, len(free)), dtype=np.int64)
    for j, c in enumerate(free):
        coef[c, j] = 1
        e = g.edges[c]
        # route one unit back from head to tail along the tree
        a, b = e.dst, e.src
        up_a, up_b = [], []
        while a != b:
            if depth[a] >= depth[b]:
                up_a.append(a)
                a = parent[a]
            else:
                up_b.append(b)
                b = parent[b]
        for x in up_a:  # travel x -> parent(x)
            t = g.edges[parent_edge[x]]
            coef[t.id, j] += 1 if t.src == x else -1
        for x in up_b:  # travel parent(x) -> x
            t = g.edges[parent_edge[x]]
            coef[t.id, j] += 1 if t.dst == x else -1
    return free, coef


def _pick_best(cands: np.ndarray, target: Sequence[Fraction], n: int) -> tuple[int, ...]:
    tf = np.array([float(t) for t in target])
    dev = np.abs(cands - tf).max(axis=1)
    near = cands[dev <= dev.min() + 1e-9 * max(1, n)]

    def key(m):
        devs = [abs(int(c) - t) for c, t in zip(m, target)]
        return (max(devs), sum(d * d for d in devs), tuple(int(c) for c in m))

    return min((tuple(int(c) for c in m) for m in near), key=key)


def _milp_quantize(chain: MarkovChain, n: int) -> tuple[int, ...]:
    from scipy.optimize import Bounds, LinearConstraint, milp

    g = chain.graph
    ne = g.num_edges
    target = np.array([float(p) * n for p in chain.edge_prob])
    c = np.zeros(ne + 1)
    c[-1] = 1.0
    a_dev = np.zeros((2 * ne, ne + 1))
    for e in range(ne):
        a_dev[2 * e, e], a_dev[2 * e, -1] = 1, -1
        a_dev[2 * e + 1, e], a_dev[2 * e + 1, -1] = -1, -1
    ub_dev = np.empty(2 * ne)
    ub_dev[0::2], ub_dev[1::2] = target, -target
    a_eq = np.zeros((g.num_vertices + 1, ne + 1))
    for e in g.edges:
        a_eq[e.src, e.id] += 1
        a_eq[e.dst, e.id] -= 1
    a_eq[-1, :ne] = 1
    b_eq = np.zeros(g.num_vertices + 1)
    b_eq[-1] = n
    res = milp(
        c,
        constraints=[LinearConstraint(a_dev, -np.inf, ub_dev), LinearConstraint(a_eq, b_eq, b_eq)],
        integrality=np.r_[np.ones(ne), 0],
        bounds=Bounds(np.r_[np.ones(ne), 0], np.r_[np.full(ne, n), np.inf]),
    )
    if not res.success:
        raise ChainError(f"no balanced integer quantization with n = {n}: {res.message}")
    return tuple(int(round(v)) for v in res.x[:ne])


def quantize_n_integral(chain: MarkovChain, n: int) -> IntegralChain:
    """Balanced counts ``m(e) >= 1`` summing to ``n`` closest to ``n P(e)`` in max-norm.

    Exhaustive over the lattice of circulations inside a growing window around
    ``n P``; falls back to a mixed-integer program when the window grows past
    ``QUANTIZE_SEARCH_LIMIT`` lattice points. Ties break on squared deviation,
    then lexicographically on the count vector.
    """
    g = chain.graph
    if not chain.full_support:
        raise ChainError("quantization requires full support")
    if n < g.num_edges:
        raise ChainError(f"n = {n} is smaller than |E| = {g.num_edges}; some edge would get count 0")
    target = [p * n for p in chain.edge_prob]
    free, coef = _cycle_basis(g)
    tf = np.array([float(t) for t in target])

    radius = 1
    while radius <= n:
        ranges = []
        for c in free:
            lo = max(1, math.ceil(target[c] - radius))
            hi = min(n, math.floor(target[c] + radius))
            ranges.append(np.arange(lo, hi + 1, dtype=np.int64))
        size = math.prod(len(r) for r in ranges)
        if size > QUANTIZE_SEARCH_LIMIT:
            break
        if size:
            grid = (
                np.array(list(itertools.product(*ranges)), dtype=np.int64).reshape(size, len(free))
                if free
                else np.zeros((1, 0), dtype=np.int64)
            )
            m = grid @ coef.T
            ok = (m >= 1).all(axis=1) & (m.sum(axis=1) == n)
            ok &= (np.abs(m - tf) <= radius + 1e-9).all(axis=1)
            if ok.any():
                counts = _pick_best(m[ok], target, n)
                return IntegralChain(n, counts, chain)
        radius *= 2
    return IntegralChain(n, _milp_quantize(chain, n), chain)


# ---------------------------------------------------------------------------
# Spectral gaps


@dataclass(frozen=True)
class GapReport:
    eigenvalues: tuple[complex, ...]
    absolute_gap: float
    reversible: bool
    spectral_gap: float | None
    pseudo_gap: float
    pseudo_gap_k: int
    k_max: int

    @property
    def bernstein_gap(self) -> float:
        """The gap the Bernstein tail uses: spectral if reversible, pseudo otherwise."""
        return self.spectral_gap if self.reversible else self.pseudo_gap


def _drop_unit(values: np.ndarray) -> np.ndarray:
    """Remove one copy of the Perron eigenvalue (the one nearest 1)."""
    if values.size == 0:
        return values
    k = int(np.argmin(np.abs(values - 1.0)))
    if abs(values[k] - 1.0) > 1e-6:
        raise ChainError("transition matrix has no unit eigenvalue")
    return np.delete(values, k)


def _self_adjoint_gap(m: np.ndarray, sqrt_pi: np.ndarray) -> float:
    sym = (sqrt_pi[:, None] * m) / sqrt_pi[None, :]
    sym = (sym + sym.T) / 2
    rest = _drop_unit(np.linalg.eigvalsh(sym))
    if rest.size == 0:
        return 1.0
    return float(1.0 - rest.max())


def spectral_gaps(chain: MarkovChain, k_max: int = 32) -> GapReport:
    """Absolute, spectral (reversible case) and pseudo spectral gaps.

    Degenerate single-state chains get every gap equal to 1.
    """
    support = [v for v, m in enumerate(chain.pi) if m > 0]
    t = chain.transition_matrix()[np.ix_(support, support)]
    pi = np.array([float(chain.pi[v]) for v in support])
    vals = np.linalg.eigvals(t)
    rest = _drop_unit(vals)
    rest = rest[np.abs(rest) > EIG_TOL] if rest.size else rest
    absolute = 1.0 if rest.size == 0 else float(1.0 - np.abs(rest).max())
    sqrt_pi = np.sqrt(pi)

    reversible = chain.reversible
    gamma = _self_adjoint_gap(t, sqrt_pi) if reversible else None
    if gamma is not None and abs(1.0 - gamma) < EIG_TOL:
        gamma = 1.0

    adjoint = (t.T * pi[None, :]) / pi[:, None]
    best, best_k = -math.inf, 1
    tk = np.eye(len(support))
    ak = np.eye(len(support))
    for k in range(1, k_max + 1):
        tk = tk @ t
        ak = ak @ adjoint
        val = _self_adjoint_gap(ak @ tk, sqrt_pi) / k
        if val > best + 1e-15:
            best, best_k = val, k
    if abs(best - 1.0) < EIG_TOL:
        best = 1.0
    return GapReport(
        eigenvalues=tuple(complex(v) for v in vals),
        absolute_gap=absolute,
        reversible=reversible,
        spectral_gap=gamma,
        pseudo_gap=best,
        pseudo_gap_k=best_k,
        k_max=k_max,
    )


def chain_from_mapping(g: LabeledGraph, probs: Mapping[int, Fraction]) -> MarkovChain:
    return MarkovChain(g, tuple(Fraction(probs.get(e, 0)) for e in range(g.num_edges)))
