"""Remove codewords from an enumerated pool until no two prefixes are too close."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .bounds import collision_and_distance
from .pool import Codeword, PoolSpec, prefix_probability

BLOCK_CELLS = 1 << 24  # comparison cells per block


class ExpurgationError(ValueError):
    pass


def thread_count() -> int:
    env = os.environ.get("WCC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ExpurgationError(f"WCC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def hamming_matrix(rows: np.ndarray) -> np.ndarray:
    """All-pairs Hamming distances, computed in row blocks."""
    m = rows.shape[0]
    out = np.zeros((m, m), dtype=np.int64)
    step = max(1, BLOCK_CELLS // max(1, m * rows.shape[1]))
    starts = list(range(0, m, step))

    def block(s: int):
        out[s : s + step] = (rows[s : s + step, None, :] != rows[None, :, :]).sum(axis=2)

    workers = min(thread_count(), len(starts)) or 1
    if workers == 1:
        for s in starts:
            block(s)
    else:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(block, starts))
    return out


@dataclass(frozen=True)
class BadPairGraph:
    pool: tuple[Codeword, ...]
    spec: PoolSpec
    eps: Fraction
    threshold: Fraction  # prefix relative-distance target 1 - S - eps
    distances: np.ndarray = field(repr=False, compare=False)
    adjacency: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.pool)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nb in enumerate(self.adjacency) for j in nb if i < j]

    @property
    def pool_mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @property
    def p_max(self) -> Fraction:
        return max(self.weights) if self.weights else Fraction(0)

    @property
    def bad_mass(self) -> Fraction:
        """Probability that two independent prefixes form a bad pair (ordered double sum)."""
        return 2 * sum((self.weights[i] * self.weights[j] for i, j in self.edges), Fraction(0))

    def exact_p_fail_eff(self) -> Fraction:
        return max(self.bad_mass, self.p_max * self.pool_mass / 2)


def _threshold(spec: PoolSpec, eps) -> Fraction:
    eps = Fraction(eps)
    _, dist = collision_and_distance(spec.chain)
    if not 0 < eps < dist:
        raise ExpurgationError(f"eps must lie in (0, 1 - S) = (0, {dist})")
    return dist - eps


def build_bad_pair_graph(pool: Sequence[Codeword], spec: PoolSpec, eps) -> BadPairGraph:
    """Edge between two codewords iff their prefixes are at relative distance strictly below ``1 - S - eps``."""
    eps = Fraction(eps)
    thr = _threshold(spec, eps)
    npr = spec.n_prime
    for c in pool:
        if c.prefix_len != npr or len(c.labels) != spec.n:
            raise ExpurgationError("pool codeword does not match the pool spec lengths")
    rows = np.array([c.prefix for c in pool], dtype=np.int64).reshape(len(pool), npr)
    dist = hamming_matrix(rows) if len(pool) else np.zeros((0, 0), dtype=np.int64)
    # d / n' < thr  <=>  d < ceil(thr n') for integer d
    bad = dist < math.ceil(thr * npr)
    np.fill_diagonal(bad, False)
    adj = tuple(tuple(int(j) for j in np.flatnonzero(bad[i])) for i in range(len(pool)))
    weights = tuple(prefix_probability(spec.chain, c) for c in pool)
    return BadPairGraph(tuple(pool), spec, eps, thr, dist, adj, weights)


@dataclass(frozen=True)
class ExpurgatedCode:
    codewords: tuple[Codeword, ...]
    indices: tuple[int, ...]
    spec: PoolSpec
    eps: Fraction
    threshold: Fraction
    mode: str  # "randomized" or "greedy"
    seed: int | None = None
    z: float | None = None
    clamped_vertices: int = 0
    survivors: int | None = None

    @property
    def size(self) -> int:
        return len(self.codewords)

    def mode_line(self) -> str:
        if self.mode == "greedy":
            return "greedy"
        return f"randomized {self.seed} {self.z!r}"


def expurgate_randomized(g: BadPairGraph, pool_mass: float, p_fail_eff: float, seed: int) -> ExpurgatedCode:
    """Keep each codeword with probability ``z |C| P(c)``, then break every surviving bad pair."""
    m = g.size
    if m == 0:
        return ExpurgatedCode((), (), g.spec, g.eps, g.threshold, "randomized", seed, 0.0, 0, 0)
    if p_fail_eff <= 0:
        raise ExpurgationError("effective failure probability must be positive")
    z = pool_mass / (2 * p_fail_eff * m)
    keep_p = np.array([z * m * float(w) for w in g.weights])
    clamped = int((keep_p > 1).sum())
    keep_p = np.minimum(keep_p, 1.0)
    rng = np.random.default_rng(seed)
    alive = rng.random(m) < keep_p
    survivors = int(alive.sum())
    weights = g.weights
    for i, j in g.edges:
        if alive[i] and alive[j]:
            # drop the lighter endpoint; on equal weight drop the larger index
            drop = i if weights[i] < weights[j] else j
            alive[drop] = False
    idx = tuple(int(i) for i in np.flatnonzero(alive))
    return ExpurgatedCode(
        tuple(g.pool[i] for i in idx), idx, g.spec, g.eps, g.threshold, "randomized", seed, z, clamped, survivors
    )


def expurgate_greedy(g: BadPairGraph) -> ExpurgatedCode:
    """Repeatedly keep the heaviest remaining codeword (smaller index on ties) and drop its bad neighbors."""
    order = sorted(range(g.size), key=lambda i: (-g.weights[i], i))
    removed = [False] * g.size
    kept = []
    for i in order:
        if removed[i]:
            continue
        kept.append(i)
        removed[i] = True
        for j in g.adjacency[i]:
            removed[j] = True
    idx = tuple(sorted(kept))
    return ExpurgatedCode(tuple(g.pool[i] for i in idx), idx, g.spec, g.eps, g.threshold, "greedy")


@dataclass(frozen=True)
class DistanceReport:
    min_prefix: Fraction | float
    min_full: Fraction | float
    prefix_target: Fraction
    full_target: Fraction


def verify_min_distance(code: ExpurgatedCode, spec: PoolSpec) -> DistanceReport:
    """Exact minimum relative distances; raises if the prefix or floor-aware full-length target fails."""
    thr = code.threshold
    full_thr = Fraction(spec.n_prime, spec.n) * thr
    if code.size < 2:
        return DistanceReport(math.inf, math.inf, thr, full_thr)
    full = np.array([c.labels for c in code.codewords], dtype=np.int64)
    d_full = hamming_matrix(full)
    d_pre = hamming_matrix(full[:, : spec.n_prime])
    iu = np.triu_indices(code.size, 1)
    mp = Fraction(int(d_pre[iu].min()), spec.n_prime)
    mf = Fraction(int(d_full[iu].min()), spec.n)
    if mp < thr:
        raise ExpurgationError(f"prefix distance {mp} below target {thr}")
    if mf < full_thr:
        raise ExpurgationError(f"full-length distance {mf} below target {full_thr}")
    return DistanceReport(mp, mf, thr, full_thr)
