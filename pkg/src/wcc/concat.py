"""Concatenation: a Reed-Solomon outer code whose symbols index inner codewords."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import LabeledGraph
from .markov import ChainError, entropy_rate
from .pool import Codeword, PoolError, PoolTemplate
from .rs import DecodeFailure, RSCode, select_field


class ConcatError(ValueError):
    pass


@dataclass(frozen=True)
class ConcatParams:
    graph: LabeledGraph
    root: int
    inner: tuple[Codeword, ...]  # the full expurgated code, file order
    k: int
    c0: float = 0.0

    def __post_init__(self):
        if not self.inner:
            raise ConcatError("empty inner code")
        lengths = {len(c.labels) for c in self.inner}
        if len(lengths) != 1:
            raise ConcatError("inner codewords have different lengths")
        counts = {tuple(self._counts(c)) for c in self.inner}
        if len(counts) != 1:
            raise ConcatError("inner codewords do not share one edge-count vector")
        q = select_field(len(self.inner))
        RSCode(q, self.k)  # validates K

    def _counts(self, c: Codeword) -> list[int]:
        out = [0] * self.graph.num_edges
        for e in c.path:
            out[e] += 1
        return out

    @property
    def ec_size(self) -> int:
        return len(self.inner)

    @cached_property
    def q(self) -> int:
        return select_field(self.ec_size)

    @cached_property
    def rs(self) -> RSCode:
        return RSCode(self.q, self.k)

    @property
    def table(self) -> tuple[Codeword, ...]:
        return self.inner[: self.q]

    @cached_property
    def table_array(self) -> np.ndarray:
        return np.array([c.labels for c in self.table], dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.inner[0].labels)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(self._counts(self.inner[0]))

    @property
    def n_out(self) -> int:
        return self.q - 1

    @property
    def d_out(self) -> int:
        return self.rs.distance

    @cached_property
    def d_in(self) -> int:
        t = self.table_array
        d = (t[:, None, :] != t[None, :, :]).sum(axis=2)
        iu = np.triu_indices(len(t), 1)
        return int(d[iu].min())

    @property
    def n_con(self) -> int:
        return self.n * self.n_out

    @property
    def d_con(self) -> int:
        return self.d_in * self.d_out

    @property
    def r_in(self) -> float:
        return math.log2(self.ec_size) / self.n

    @property
    def r_in_used(self) -> float:
        return math.log2(self.q) / self.n

    @property
    def r_out(self) -> Fraction:
        return Fraction(self.k, self.q - 1)

    @property
    def r_con(self) -> float:
        return self.r_in_used * float(self.r_out)

    def lines(self) -> list[str]:
        return [
            f"ec_size {self.ec_size} codewords",
            f"q {self.q}",
            f"g {self.rs.g}",
            f"K {self.k}",
            f"n_inner {self.n} symbols",
            f"d_in {self.d_in} symbols",
            f"N_out {self.n_out} symbols",
            f"D_out {self.d_out} symbols",
            f"N_con {self.n_con} symbols",
            f"D_con {self.d_con} symbols",
            f"R_in {self.r_in!r} bits/symbol",
            f"R_in_used {self.r_in_used!r} bits/symbol",
            f"R_out {self.r_out}",
            f"R_con {self.r_con!r} bits/symbol",
        ]


def concat_encode_path(msg: Sequence[int], params: ConcatParams) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Labels and edge path of the concatenated codeword."""
    symbols = params.rs.encode(msg)
    labels: list[int] = []
    path: list[int] = []
    for s in symbols:
        c = params.table[s]
        labels.extend(c.labels)
        path.extend(c.path)
    return tuple(labels), tuple(path)


def concat_encode(msg: Sequence[int], params: ConcatParams) -> tuple[int, ...]:
    labels, path = concat_encode_path(msg, params)
    if not is_weakly_constrained(params, labels, path):
        raise AssertionError("concatenated codeword broke the weak constraint")
    return labels


def is_weakly_constrained(params: ConcatParams, labels: Sequence[int], path: Sequence[int]) -> bool:
    """Closed root walk with edge counts ``(q - 1) m(e)`` reading ``labels``."""
    g = params.graph
    if len(path) != params.n_con or g.labels_of(path) != tuple(labels):
        return False
    if g.edges[path[0]].src != params.root or g.edges[path[-1]].dst != params.root:
        return False
    for a, b in zip(path, path[1:]):
        if g.edges[a].dst != g.edges[b].src:
            return False
    counts = [0] * g.num_edges
    for e in path:
        counts[e] += 1
    return tuple(counts) == tuple(params.n_out * c for c in params.counts)


@dataclass(frozen=True)
class DecodeResult:
    message: tuple[int, ...] | None
    inner_symbols: tuple[int, ...]
    inner_distances: tuple[int, ...]
    failure: str | None


def inner_decode(blocks: np.ndarray, params: ConcatParams) -> tuple[np.ndarray, np.ndarray]:
    """Nearest table codeword per block (smallest index on ties) and its distance."""
    d = (blocks[:, None, :] != params.table_array[None, :, :]).sum(axis=2)
    idx = d.argmin(axis=1)  # argmin returns the first minimum
    return idx, d[np.arange(len(idx)), idx]


def concat_decode_detail(word: Sequence[int], params: ConcatParams) -> DecodeResult:
    if len(word) != params.n_con:
        raise ConcatError(f"received word must have {params.n_con} symbols, got {len(word)}")
    na = len(params.graph.alphabet)
    arr = np.asarray(word, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= na):
        raise ConcatError("received symbol outside the alphabet")
    idx, dist = inner_decode(arr.reshape(params.n_out, params.n), params)
    syms = tuple(int(i) for i in idx)
    try:
        msg = params.rs.decode(syms)
    except DecodeFailure as exc:
        return DecodeResult(None, syms, tuple(int(x) for x in dist), str(exc))
    return DecodeResult(msg, syms, tuple(int(x) for x in dist), None)


def concat_decode(word: Sequence[int], params: ConcatParams) -> tuple[int, ...]:
    res = concat_decode_detail(word, params)
    if res.message is None:
        raise DecodeFailure(res.failure)
    return res.message


@dataclass(frozen=True)
class ScalePlan:
    target: int
    c0: float
    n: int
    n_requested: int
    n_out: int
    r_in: float
    log2_q_bound: float
    poly_degree: float  # q <= target ** poly_degree

    def lines(self) -> list[str]:
        return [
            f"target_N_con {self.target} symbols",
            f"c0 {self.c0!r}",
            f"n_requested {self.n_requested} symbols",
            f"n {self.n} symbols",
            f"N_out {self.n_out} symbols",
            f"R_in {self.r_in!r} bits/symbol",
            f"log2_q_bound {self.log2_q_bound!r} bits",
            f"q_poly_degree {self.poly_degree!r}",
        ]


def scale_plan(target: int, c0: float, template: PoolTemplate, r_in: float | None = None) -> ScalePlan:
    """Inner blocklength ``n = round(c0 log2 target)``, moved up to the nearest feasible value.

    ``r_in`` defaults to the asymptotic inner rate ``alpha H(P)``.
    """
    if c0 <= 0:
        raise ConcatError("c0 must be positive")
    if target < 2:
        raise ConcatError("target blocklength must be at least 2")
    ne = template.chain.graph.num_edges
    n0 = round(c0 * math.log2(target))
    if n0 < ne:
        raise ConcatError(f"n = {n0} is below |E| = {ne}: no n-integral chain uses every edge")
    if r_in is None:
        r_in = float(template.alpha) * entropy_rate(template.chain)
    for n in range(n0, n0 + ne + 1):
        try:
            template.instantiate(n)
        except (ChainError, PoolError):
            continue
        log2_q = n * r_in
        return ScalePlan(target, c0, n, n0, target // n, r_in, log2_q, log2_q / math.log2(target))
    raise ConcatError(f"no feasible inner blocklength in [{n0}, {n0 + ne}]")
