"""Substitution channel and end-to-end simulation of the concatenated code."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .concat import ConcatParams, concat_encode, inner_decode
from .rs import DecodeFailure


@dataclass(frozen=True)
class ChannelModel:
    """Each symbol is replaced, with probability ``p``, by a uniformly chosen different symbol."""

    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"substitution probability must lie in [0, 1], got {self.p}")

    def corrupt(self, words: np.ndarray, alphabet_size: int, rng: np.random.Generator) -> np.ndarray:
        hit = rng.random(words.shape) < self.p
        if alphabet_size < 2:
            return words.copy()
        shift = rng.integers(1, alphabet_size, size=words.shape)
        return np.where(hit, (words + shift) % alphabet_size, words)


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    p: float
    seed: int
    message_errors: int
    decode_failures: int
    inner_blocks: int
    inner_failures: int
    block_failure_histogram: tuple[tuple[int, int], ...]
    heavy_block_histogram: tuple[tuple[int, int], ...]
    guaranteed_trials: int
    guaranteed_violations: int

    @property
    def message_error_rate(self) -> float:
        return self.message_errors / self.trials

    @property
    def inner_failure_rate(self) -> float:
        return self.inner_failures / self.inner_blocks

    def lines(self) -> list[str]:
        hist = ",".join(f"{k}:{v}" for k, v in self.block_failure_histogram)
        heavy = ",".join(f"{k}:{v}" for k, v in self.heavy_block_histogram)
        return [
            f"trials {self.trials}",
            f"p {self.p!r} probability",
            f"seed {self.seed}",
            f"message_error_rate {self.message_error_rate!r} probability",
            f"decode_failures {self.decode_failures}",
            f"inner_failure_rate {self.inner_failure_rate!r} probability",
            f"inner_failure_histogram {hist}",
            f"heavy_block_histogram {heavy}",
            f"guaranteed_trials {self.guaranteed_trials}",
            f"guaranteed_violations {self.guaranteed_violations}",
        ]


def simulate_channel(code: ConcatParams, model: ChannelModel, trials: int, seed: int | None = None) -> SimulationReport:
    """Random message, encode, corrupt, decode; per-trial accounting of inner and outer failures.

    A trial is in the guaranteed region when at most ``floor((D_out - 1)/2)``
    blocks carry ``ceil(d_in/2)`` or more substitutions.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = model.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    q, k, n, nout = code.q, code.k, code.n, code.n_out
    msgs = rng.integers(0, q, size=(trials, k))
    words = np.array([concat_encode(tuple(int(x) for x in m), code) for m in msgs], dtype=np.int64)
    received = model.corrupt(words, len(code.graph.alphabet), rng)
    blocks = received.reshape(trials * nout, n)
    idx, _ = inner_decode(blocks, code)
    idx = idx.reshape(trials, nout)
    sent = np.array([code.rs.encode(tuple(int(x) for x in m)) for m in msgs], dtype=np.int64)
    wrong_blocks = (idx != sent).sum(axis=1)
    errs = (received != words).reshape(trials, nout, n).sum(axis=2)
    heavy = (errs >= math.ceil(code.d_in / 2)).sum(axis=1)

    message_errors = failures = violations = guaranteed = 0
    for t in range(trials):
        ok = True
        try:
            out = code.rs.decode(tuple(int(x) for x in idx[t]))
            ok = out == tuple(int(x) for x in msgs[t])
        except DecodeFailure:
            failures += 1
            ok = False
        if not ok:
            message_errors += 1
        if heavy[t] <= code.rs.radius:
            guaranteed += 1
            violations += not ok
    return SimulationReport(
        trials=trials,
        p=model.p,
        seed=seed,
        message_errors=message_errors,
        decode_failures=failures,
        inner_blocks=trials * nout,
        inner_failures=int(wrong_blocks.sum()),
        block_failure_histogram=tuple(sorted(Counter(int(x) for x in wrong_blocks).items())),
        heavy_block_histogram=tuple(sorted(Counter(int(x) for x in heavy).items())),
        guaranteed_trials=guaranteed,
        guaranteed_violations=violations,
    )


def binomial_tail(n: int, p: float, k: int) -> float:
    """``P(Bin(n, p) >= k)`` by direct summation."""
    if k <= 0:
        return 1.0
    return float(sum(math.comb(n, i) * p**i * (1 - p) ** (n - i) for i in range(k, n + 1)))
