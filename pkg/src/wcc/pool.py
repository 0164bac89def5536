"""The Eulerian-cycle codebook: typical prefixes from a root, closed by the
lexicographically first Eulerian path through the residual multigraph."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .graph import LabeledGraph, Multigraph, NoEulerianPath, lex_first_eulerian_path
from .markov import IntegralChain, MarkovChain, quantize_n_integral

DEFAULT_SAMPLE_BUDGET = 10**6


class PoolError(ValueError):
    pass


class PoolLimitExceeded(PoolError):
    def __init__(self, limit: int, partial: int):
        self.limit = limit
        self.partial = partial
        super().__init__(f"pool enumeration exceeded limit {limit} (found {partial} so far)")


class SamplingBudgetExhausted(PoolError):
    pass


@dataclass(frozen=True)
class PoolSpec:
    ichain: IntegralChain
    alpha: Fraction
    zeta: Fraction
    root: int

    def __post_init__(self):
        alpha, zeta = Fraction(self.alpha), Fraction(self.zeta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "zeta", zeta)
        chain = self.chain
        if not 0 < alpha < 1:
            raise PoolError(f"alpha must lie in (0, 1), got {alpha}")
        if not chain.full_support:
            raise PoolError("the construction needs P(e) > 0 on every edge")
        if min(self.ichain.counts) < 1:
            raise PoolError("every edge needs count m(e) >= 1")
        zmax = (1 - alpha) / alpha * chain.p_min
        if not 0 < zeta < zmax:
            raise PoolError(f"zeta must lie in (0, {zmax}) = (0, ((1-alpha)/alpha) P_min), got {zeta}")
        if not 0 <= self.root < self.graph.num_vertices:
            raise PoolError("root vertex out of range")
        if chain.pi[self.root] <= 0:
            raise PoolError("root vertex has zero stationary mass")
        if self.n_prime < 1:
            raise PoolError(f"prefix length floor(alpha n) = {self.n_prime} is empty")

    @property
    def chain(self) -> MarkovChain:
        return self.ichain.parent

    @property
    def graph(self) -> LabeledGraph:
        return self.ichain.parent.graph

    @property
    def n(self) -> int:
        return self.ichain.n

    @property
    def n_prime(self) -> int:
        return math.floor(self.alpha * self.n)

    @cached_property
    def count_bounds(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Integer range ``lo <= S(e) <= hi`` equivalent to the strict band plus ``R(e) >= 1``.

        Quantization can make ``m(e) < n P(e)``, so the band alone does not
        keep every residual multiplicity positive.
        """
        npr = self.n_prime
        lo, hi = [], []
        for p, m in zip(self.chain.edge_prob, self.ichain.counts):
            lo.append(max(0, math.floor(npr * (p - self.zeta)) + 1))
            hi.append(min(math.ceil(npr * (p + self.zeta)) - 1, m - 1))
        return tuple(lo), tuple(hi)


@dataclass(frozen=True)
class PoolTemplate:
    """Construction parameters without a blocklength."""

    chain: MarkovChain
    alpha: Fraction
    zeta: Fraction
    root: int

    def instantiate(self, n: int) -> PoolSpec:
        return PoolSpec(quantize_n_integral(self.chain, n), self.alpha, self.zeta, self.root)


@dataclass(frozen=True)
class Walk:
    graph: LabeledGraph
    start: int
    edges: tuple[int, ...]

    def __post_init__(self):
        v = self.start
        for eid in self.edges:
            e = self.graph.edges[eid]
            if e.src != v:
                raise PoolError("walk edges do not chain head-to-tail")
            v = e.dst

    @classmethod
    def from_labels(cls, graph: LabeledGraph, start: int, labels: Sequence[int]) -> "Walk":
        return cls(graph, start, graph.trace(start, labels))

    @property
    def end(self) -> int:
        return self.graph.edges[self.edges[-1]].dst if self.edges else self.start

    def counts(self) -> list[int]:
        c = [0] * self.graph.num_edges
        for eid in self.edges:
            c[eid] += 1
        return c

    @property
    def labels(self) -> tuple[int, ...]:
        return self.graph.labels_of(self.edges)


@dataclass(frozen=True)
class Codeword:
    labels: tuple[int, ...]
    path: tuple[int, ...]
    prefix_len: int

    @property
    def prefix(self) -> tuple[int, ...]:
        return self.labels[: self.prefix_len]


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    violations: tuple[int, ...]
    residual: tuple[int, ...]


def is_admissible_prefix(w: Walk, spec: PoolSpec) -> Admissibility:
    if w.start != spec.root:
        raise PoolError("prefix must start at the root vertex")
    if len(w.edges) != spec.n_prime:
        raise PoolError(f"prefix length {len(w.edges)} != floor(alpha n) = {spec.n_prime}")
    s = w.counts()
    npr = spec.n_prime
    viol = tuple(
        e for e, p in enumerate(spec.chain.edge_prob) if not abs(Fraction(s[e], npr) - p) < spec.zeta
    )
    residual = tuple(m - c for m, c in zip(spec.ichain.counts, s))
    viol = tuple(sorted(set(viol) | {e for e, r in enumerate(residual) if r < 1}))
    return Admissibility(not viol, viol, residual)


def complete_prefix(w: Walk, spec: PoolSpec) -> Codeword:
    adm = is_admissible_prefix(w, spec)
    if not adm.admissible:
        raise PoolError(f"prefix is not admissible (edges {list(adm.violations)} outside the band or exhausted)")
    return _complete(spec, w.edges, w.end, adm.residual)


def _complete(spec: PoolSpec, prefix: Sequence[int], end: int, residual: Sequence[int]) -> Codeword:
    if min(residual) < 1:
        raise PoolError("internal: admissible prefix left an empty residual edge")
    try:
        suffix = lex_first_eulerian_path(Multigraph(spec.graph, tuple(residual)), end, spec.root)
    except NoEulerianPath as exc:
        raise PoolError(f"internal: residual multigraph has no Eulerian completion ({exc})") from exc
    path = tuple(prefix) + suffix
    return Codeword(spec.graph.labels_of(path), path, len(prefix))


def _admissible_prefixes(spec: PoolSpec) -> Iterable[tuple[tuple[int, ...], int, list[int]]]:
    g = spec.graph
    lo, hi = spec.count_bounds
    npr = spec.n_prime
    if any(l > h for l, h in zip(lo, hi)) or sum(lo) > npr or sum(hi) < npr:
        return
    counts = [0] * g.num_edges
    path: list[int] = []
    deficit = sum(lo)  # sum_e max(0, lo(e) - S(e))

    def rec(v: int, left: int):
        nonlocal deficit
        if left == 0:
            yield tuple(path), v, list(counts)
            return
        for eid in g.out_edges[v]:
            if counts[eid] >= hi[eid]:
                continue
            short = counts[eid] < lo[eid]
            if deficit - short > left - 1:
                continue
            counts[eid] += 1
            deficit -= short
            path.append(eid)
            yield from rec(g.edges[eid].dst, left - 1)
            path.pop()
            deficit += short
            counts[eid] -= 1

    yield from rec(spec.root, npr)


def enumerate_pool(spec: PoolSpec, limit: int | None = None) -> list[Codeword]:
    """All codewords, sorted by prefix label sequence."""
    out = []
    for prefix, end, s in _admissible_prefixes(spec):
        if limit is not None and len(out) >= limit:
            raise PoolLimitExceeded(limit, len(out))
        residual = [m - c for m, c in zip(spec.ichain.counts, s)]
        out.append(_complete(spec, prefix, end, residual))
    out.sort(key=lambda c: c.prefix)
    return out


def count_admissible_prefixes(spec: PoolSpec) -> int:
    return sum(1 for _ in _admissible_prefixes(spec))


# ---------------------------------------------------------------------------
# Random walks


class WalkSampler:
    """Vectorized random walks under ``p(.|.)``."""

    def __init__(self, chain: MarkovChain):
        g = chain.graph
        self.chain = chain
        deg = max(len(o) for o in g.out_edges)
        self.edge_table = np.full((g.num_vertices, deg), -1, dtype=np.int64)
        self.cum = np.ones((g.num_vertices, deg))
        self.dst = np.array([e.dst for e in g.edges], dtype=np.int64)
        self.labels = np.array([e.label for e in g.edges], dtype=np.int64)
        for v, outs in enumerate(g.out_edges):
            acc = 0.0
            for k, eid in enumerate(outs):
                acc += float(chain.trans(eid))
                self.edge_table[v, k] = eid
                self.cum[v, k] = acc
            # the last positive-probability edge absorbs rounding
            live = [k for k, eid in enumerate(outs) if chain.trans(eid) > 0]
            if live:
                self.cum[v, live[-1] :] = 1.0

    def walks(self, start, length: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Edge-id matrix of shape ``(size, length)``; ``start`` is a vertex or an array of them."""
        cur = np.broadcast_to(np.asarray(start, dtype=np.int64), (size,)).copy()
        out = np.empty((size, length), dtype=np.int64)
        for t in range(length):
            r = rng.random(size)
            k = (r[:, None] >= self.cum[cur]).sum(axis=1)
            eid = self.edge_table[cur, k]
            out[:, t] = eid
            cur = self.dst[eid]
        return out

    def stationary_starts(self, size: int, rng: np.random.Generator) -> np.ndarray:
        pi = np.array([float(x) for x in self.chain.pi])
        return rng.choice(len(pi), size=size, p=pi / pi.sum())


def edge_counts(walks: np.ndarray, num_edges: int) -> np.ndarray:
    """Per-walk edge count matrix of shape ``(size, num_edges)``."""
    size = walks.shape[0]
    flat = walks + num_edges * np.arange(size)[:, None]
    return np.bincount(flat.ravel(), minlength=size * num_edges).reshape(size, num_edges)


def admissible_mask(counts: np.ndarray, spec: PoolSpec) -> np.ndarray:
    lo, hi = spec.count_bounds
    return ((counts >= np.array(lo)) & (counts <= np.array(hi))).all(axis=1)


def sample_codeword(
    spec: PoolSpec, seed: int, budget: int = DEFAULT_SAMPLE_BUDGET, batch: int = 256
) -> tuple[Codeword, int]:
    """Rejection-sample a codeword; returns it with the number of rejected walks."""
    rng = np.random.default_rng(seed)
    sampler = WalkSampler(spec.chain)
    tried = 0
    while tried < budget:
        size = min(batch, budget - tried)
        walks = sampler.walks(spec.root, spec.n_prime, size, rng)
        ok = np.flatnonzero(admissible_mask(edge_counts(walks, spec.graph.num_edges), spec))
        if ok.size:
            k = int(ok[0])
            w = Walk(spec.graph, spec.root, tuple(int(e) for e in walks[k]))
            return complete_prefix(w, spec), tried + k
        tried += size
    raise SamplingBudgetExhausted(f"no admissible prefix in {budget} random walks")


def prefix_probability(chain: MarkovChain, codeword: Codeword) -> Fraction:
    """Probability that a walk from the root generates this codeword's prefix."""
    p = Fraction(1)
    for eid in codeword.path[: codeword.prefix_len]:
        p *= chain.trans(eid)
    return p


def verify_weak_constraint(c: Codeword, ichain: IntegralChain, root: int | None = None) -> bool:
    """Exact (zero-tolerance) membership: closed walk with edge counts ``m(e)``."""
    g = ichain.graph
    if len(c.path) != ichain.n or len(c.labels) != ichain.n:
        return False
    if not c.path:
        return True
    for a, b in zip(c.path, c.path[1:]):
        if g.edges[a].dst != g.edges[b].src:
            return False
    first, last = g.edges[c.path[0]], g.edges[c.path[-1]]
    if first.src != last.dst:
        return False
    if root is not None and first.src != root:
        return False
    if g.labels_of(c.path) != tuple(c.labels):
        return False
    counts = [0] * g.num_edges
    for eid in c.path:
        counts[eid] += 1
    return tuple(counts) == tuple(ichain.counts)


def codeword_from_labels(graph: LabeledGraph, root: int, labels: Sequence[int], prefix_len: int) -> Codeword:
    return Codeword(tuple(labels), graph.trace(root, labels), prefix_len)
