"""Labeled directed graphs, edge-replicated multigraphs and Eulerian completion."""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Malformed or structurally invalid graph input."""


class GraphFormatError(GraphError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NoEulerianPath(GraphError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    src: int
    dst: int
    label: int


@dataclass(frozen=True)
class LabeledGraph:
    """A deterministic labeled digraph ``G = (V, E, L)``.

    Vertices and symbols are stored by name; edges refer to them by index
    (declaration order). Edge ids are dense ``0..|E|-1``.
    """

    alphabet: tuple[str, ...]
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise GraphError("duplicate alphabet symbol")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex name")
        seen: dict[tuple[int, int], int] = {}
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise GraphError(f"edge ids must be dense, got {e.id} at position {i}")
            if not (0 <= e.src < len(self.vertices) and 0 <= e.dst < len(self.vertices)):
                raise GraphError(f"edge {i} references an undeclared vertex")
            if not 0 <= e.label < len(self.alphabet):
                raise GraphError(f"edge {i} references an undeclared symbol")
            key = (e.src, e.label)
            if key in seen:
                raise GraphError(
                    f"determinism violated: vertex {self.vertices[e.src]!r} has two "
                    f"out-edges labeled {self.alphabet[e.label]!r} (edges {seen[key]} and {i})"
                )
            seen[key] = i

    @classmethod
    def build(
        cls,
        alphabet: Sequence[str],
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str, str]],
    ) -> "LabeledGraph":
        """Build from names: ``edges`` holds ``(src, dst, label)`` triples."""
        vidx = {v: i for i, v in enumerate(vertices)}
        sidx = {a: i for i, a in enumerate(alphabet)}
        elist = []
        for i, (s, d, a) in enumerate(edges):
            try:
                elist.append(Edge(i, vidx[s], vidx[d], sidx[a]))
            except KeyError as exc:
                raise GraphError(f"edge {i} references undeclared name {exc.args[0]!r}") from None
        return cls(tuple(alphabet), tuple(vertices), tuple(elist))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex_id(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise GraphError(f"unknown vertex {name!r}") from None

    def symbol_id(self, sym: str) -> int:
        try:
            return self.alphabet.index(sym)
        except ValueError:
            raise GraphError(f"unknown symbol {sym!r}") from None

    def sort_key(self, eid: int) -> tuple[int, int, int]:
        # Order behind "lexicographically first": label position, then head, then id.
        e = self.edges[eid]
        return (e.label, e.dst, e.id)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        """Out-edge ids of each vertex, in lexicographic edge order."""
        out: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            out[e.src].append(e.id)
        return tuple(tuple(sorted(lst, key=self.sort_key)) for lst in out)

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        inn: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            inn[e.dst].append(e.id)
        return tuple(tuple(lst) for lst in inn)

    @cached_property
    def _by_label(self) -> dict[tuple[int, int], int]:
        return {(e.src, e.label): e.id for e in self.edges}

    def edge_from(self, v: int, label: int) -> int | None:
        return self._by_label.get((v, label))

    def adjacency(self) -> np.ndarray:
        """Vertex adjacency matrix counting parallel edges."""
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=np.int64)
        for e in self.edges:
            a[e.src, e.dst] += 1
        return a

    def trace(self, start: int, labels: Sequence[int]) -> tuple[int, ...]:
        """Follow a label sequence (symbol indices) from ``start``; determinism makes it unique."""
        path = []
        v = start
        for pos, a in enumerate(labels):
            eid = self.edge_from(v, a)
            if eid is None:
                raise GraphError(
                    f"label {self.alphabet[a]!r} at position {pos} cannot be read from "
                    f"vertex {self.vertices[v]!r}"
                )
            path.append(eid)
            v = self.edges[eid].dst
        return tuple(path)

    def labels_of(self, path: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.edges[e].label for e in path)

    def to_text(self) -> str:
        """Canonical graph-file serialization."""
        lines = ["alphabet " + " ".join(self.alphabet)]
        lines += [f"vertex {v}" for v in self.vertices]
        lines += [
            f"edge {self.vertices[e.src]} {self.vertices[e.dst]} {self.alphabet[e.label]}"
            for e in self.edges
        ]
        return "\n".join(lines) + "\n"

    @cached_property
    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_graph(text: str) -> LabeledGraph:
    """Parse the line-oriented graph format.

    The ``alphabet`` line may be omitted, in which case symbols are ordered
    by first appearance among the edge lines.
    """
    alphabet: list[str] | None = None
    vertices: list[str] = []
    raw_edges: list[tuple[int, str, str, str]] = []
    for lineno, tok in _tokens(text):
        kind, args = tok[0], tok[1:]
        if kind == "alphabet":
            if alphabet is not None:
                raise GraphFormatError("alphabet declared twice", lineno)
            if not args:
                raise GraphFormatError("empty alphabet", lineno)
            if len(set(args)) != len(args):
                raise GraphFormatError("duplicate alphabet symbol", lineno)
            alphabet = list(args)
        elif kind == "vertex":
            if len(args) != 1:
                raise GraphFormatError("expected 'vertex <name>'", lineno)
            if args[0] in vertices:
                raise GraphFormatError(f"vertex {args[0]!r} declared twice", lineno)
            vertices.append(args[0])
        elif kind == "edge":
            if len(args) != 3:
                raise GraphFormatError("expected 'edge <src> <dst> <label>'", lineno)
            raw_edges.append((lineno, *args))
        else:
            raise GraphFormatError(f"unknown directive {kind!r}", lineno)

    if alphabet is None:
        alphabet = []
        for _, _, _, a in raw_edges:
            if a not in alphabet:
                alphabet.append(a)
    vidx = {v: i for i, v in enumerate(vertices)}
    sidx = {a: i for i, a in enumerate(alphabet)}
    seen: dict[tuple[int, int], int] = {}
    edges = []
    for eid, (lineno, s, d, a) in enumerate(raw_edges):
        for name in (s, d):
            if name not in vidx:
                raise GraphFormatError(f"undeclared vertex {name!r}", lineno)
        if a not in sidx:
            raise GraphFormatError(f"undeclared symbol {a!r}", lineno)
        key = (vidx[s], sidx[a])
        if key in seen:
            raise GraphFormatError(
                f"determinism violated: vertex {s!r} already has an out-edge labeled {a!r} "
                f"(line {seen[key]})",
                lineno,
            )
        seen[key] = lineno
        edges.append(Edge(eid, vidx[s], vidx[d], sidx[a]))
    return LabeledGraph(tuple(alphabet), tuple(vertices), tuple(edges))


def load_graph(path) -> LabeledGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# ---------------------------------------------------------------------------
# Multigraphs


@dataclass(frozen=True)
class Multigraph:
    base: LabeledGraph
    multiplicity: tuple[int, ...]

    def __post_init__(self):
        if len(self.multiplicity) != self.base.num_edges:
            raise GraphError("multiplicity vector length differs from edge count")
        if any(m < 0 for m in self.multiplicity):
            raise GraphError("negative multiplicity")

    @classmethod
    def unit(cls, g: LabeledGraph) -> "Multigraph":
        return cls(g, (1,) * g.num_edges)

    @property
    def total(self) -> int:
        return sum(self.multiplicity)

    def degrees(self) -> tuple[list[int], list[int]]:
        out = [0] * self.base.num_vertices
        inn = [0] * self.base.num_vertices
        for e, m in zip(self.base.edges, self.multiplicity):
            out[e.src] += m
            inn[e.dst] += m
        return out, inn

    @property
    def balanced(self) -> bool:
        out, inn = self.degrees()
        return out == inn


def _reach(g: LabeledGraph, start: int, alive: Sequence[int], reverse: bool = False) -> list[bool]:
    seen = [False] * g.num_vertices
    seen[start] = True
    queue = deque([start])
    adj = g.in_edges if reverse else g.out_edges
    while queue:
        v = queue.popleft()
        for eid in adj[v]:
            if alive[eid] > 0:
                e = g.edges[eid]
                w = e.src if reverse else e.dst
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return seen


def _edges_reachable(g: LabeledGraph, remaining: Sequence[int], cur: int) -> bool:
    seen = _reach(g, cur, remaining)
    return all(seen[e.src] for e in g.edges if remaining[e.id] > 0)


def lex_first_eulerian_path(m: Multigraph, start: int, end: int) -> tuple[int, ...]:
    """Lexicographically smallest Eulerian path of ``m`` from ``start`` to ``end``.

    Greedy: at each vertex take the smallest out-edge (under
    ``LabeledGraph.sort_key``) whose removal leaves a multigraph that still
    has an Eulerian path from the edge's head to ``end``.
    """
    g = m.base
    out, inn = m.degrees()
    for v in range(g.num_vertices):
        surplus = out[v] - inn[v]
        want = (v == start) - (v == end)
        if surplus != want:
            raise NoEulerianPath(
                f"degree condition fails at vertex {g.vertices[v]!r}: out-in = {surplus}, "
                f"needed {want}"
            )
    remaining = list(m.multiplicity)
    left = m.total
    if left == 0:
        if start != end:
            raise NoEulerianPath("empty multigraph but start != end")
        return ()
    if not _edges_reachable(g, remaining, start):
        raise NoEulerianPath("edges not reachable from start")

    path: list[int] = []
    cur = start
    while left:
        candidates = [eid for eid in g.out_edges[cur] if remaining[eid] > 0]
        chosen = None
        for k, eid in enumerate(candidates):
            remaining[eid] -= 1
            head = g.edges[eid].dst
            # The current state is completable, so the last candidate must work.
            if k == len(candidates) - 1:
                chosen = eid
                break
            if left - 1 == 0:
                ok = head == end
            else:
                ok = _edges_reachable(g, remaining, head)
            if ok:
                chosen = eid
                break
            remaining[eid] += 1
        if chosen is None:
            raise NoEulerianPath(f"stuck at vertex {g.vertices[cur]!r}")
        path.append(chosen)
        cur = g.edges[chosen].dst
        left -= 1
    return tuple(path)


# ---------------------------------------------------------------------------
# Structural validation


@dataclass(frozen=True)
class ValidationReport:
    deterministic: bool
    irreducible: bool
    aperiodic: bool
    period: int
    primitive: bool
    primitivity_exponent: int | None
    balanced: bool
    eulerian_cycle_exists: bool
    semi_balanced_endpoints: tuple[int, int] | None = field(default=None)


def _period_of_component(g: LabeledGraph, comp: set[int]) -> int:
    root = min(comp)
    level = {root: 0}
    queue = deque([root])
    period = 0
    while queue:
        v = queue.popleft()
        for eid in g.out_edges[v]:
            w = g.edges[eid].dst
            if w not in comp:
                continue
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
            else:
                period = gcd(period, level[v] + 1 - level[w])
    return abs(period)


def _components(g: LabeledGraph) -> list[set[int]]:
    ones = (1,) * g.num_edges
    fwd = [_reach(g, v, ones) for v in range(g.num_vertices)]
    comps: list[set[int]] = []
    assigned = [False] * g.num_vertices
    for v in range(g.num_vertices):
        if assigned[v]:
            continue
        comp = {w for w in range(g.num_vertices) if fwd[v][w] and fwd[w][v]}
        for w in comp:
            assigned[w] = True
        comps.append(comp)
    return comps


def validate_graph(g: LabeledGraph) -> ValidationReport:
    deterministic = len({(e.src, e.label) for e in g.edges}) == g.num_edges
    comps = _components(g)
    irreducible = len(comps) == 1 and g.num_edges > 0

    period = 0
    for comp in comps:
        if any(g.edges[eid].dst in comp for v in comp for eid in g.out_edges[v]):
            period = gcd(period, _period_of_component(g, comp))
    aperiodic = period == 1

    exponent = None
    if irreducible and aperiodic:
        a = g.adjacency() > 0
        power = a.copy()
        for k in range(1, g.num_vertices**2 + 1):
            if power.all():
                exponent = k
                break
            power = (power.astype(np.int64) @ a.astype(np.int64)) > 0

    mg = Multigraph.unit(g)
    out, inn = mg.degrees()
    balanced = out == inn
    endpoints = None
    diff = [o - i for o, i in zip(out, inn)]
    plus = [v for v, d in enumerate(diff) if d == 1]
    minus = [v for v, d in enumerate(diff) if d == -1]
    if len(plus) == 1 and len(minus) == 1 and sum(abs(d) for d in diff) == 2:
        endpoints = (plus[0], minus[0])

    return ValidationReport(
        deterministic=deterministic,
        irreducible=irreducible,
        aperiodic=aperiodic,
        period=period,
        primitive=exponent is not None,
        primitivity_exponent=exponent,
        balanced=balanced,
        eulerian_cycle_exists=irreducible and balanced,
        semi_balanced_endpoints=endpoints,
    )
