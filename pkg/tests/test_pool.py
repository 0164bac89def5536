from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common import chain, graph, pool, single_loop_graph, spec
from oracles import brute_force_pool
from wcc.graph import parse_graph
from wcc.markov import IntegralChain, MarkovChain, quantize_n_integral, uniform_chain
from wcc.pool import (
    Codeword,
    PoolError,
    PoolLimitExceeded,
    PoolSpec,
    SamplingBudgetExhausted,
    Walk,
    WalkSampler,
    complete_prefix,
    count_admissible_prefixes,
    edge_counts,
    enumerate_pool,
    is_admissible_prefix,
    prefix_probability,
    sample_codeword,
    verify_weak_constraint,
)

CASES = [
    ("fb", 4, F(1, 2), F(1, 4)),
    ("fb", 8, F(1, 2), F(1, 4)),
    ("fb", 12, F(1, 2), F(1, 4)),
    ("fb", 12, F(1, 3), F(1, 5)),
    ("db2", 8, F(1, 2), F(1, 5)),
    ("db2", 12, F(1, 2), F(1, 5)),
    ("db2", 12, F(1, 2), F(1, 10)),
    ("db2", 10, F(1, 2), F(1, 5)),
    ("gm", 10, F(1, 2), F(1, 5)),
    ("gm", 15, F(1, 2), F(1, 4)),
    ("gm", 15, F(1, 2), F(1, 10)),
]


def labels(name, words):
    g = graph(name)
    return ["".join(g.alphabet[s] for s in w) for w in words]


def test_pool_spec_rejects_bad_parameters():
    ic = quantize_n_integral(chain("db2"), 8)
    with pytest.raises(PoolError, match="zeta"):
        PoolSpec(ic, F(1, 2), F(1, 4), 0)  # ((1-a)/a) P_min = 1/4, strict
    with pytest.raises(PoolError, match="alpha"):
        PoolSpec(ic, F(1), F(1, 10), 0)
    with pytest.raises(PoolError, match="root"):
        PoolSpec(ic, F(1, 2), F(1, 10), 5)


def test_count_bounds_db2():
    lo, hi = spec("db2", 8).count_bounds
    assert lo == (1,) * 4 and hi == (1,) * 4


def test_is_admissible_examples():
    sp = spec("db2", 8)
    g = sp.graph
    ok = is_admissible_prefix(Walk.from_labels(g, 0, (0, 1, 1, 0)), sp)
    assert ok.admissible and ok.residual == (1, 1, 1, 1)
    bad = is_admissible_prefix(Walk.from_labels(g, 0, (0, 0, 0, 0)), sp)
    assert not bad.admissible and 0 in bad.violations


def test_exhausted_edge_is_not_admissible():
    """Quantized counts (2, 3, 3, 2) sit below n P(e) = 5/2 on two edges."""
    sp = spec("db2", 10)
    assert sp.ichain.counts == (2, 3, 3, 2)
    w = Walk(sp.graph, 0, (0, 0, 1, 3, 2))
    assert all(abs(F(c, 5) - F(1, 4)) < F(1, 5) for c in w.counts())
    adm = is_admissible_prefix(w, sp)
    assert not adm.admissible and adm.violations == (0,) and adm.residual[0] == 0
    assert sp.count_bounds[1] == (1, 2, 2, 1)


def test_complete_prefix_examples():
    sp = spec("db2", 8)
    g = sp.graph
    assert complete_prefix(Walk.from_labels(g, 0, (0, 1, 1, 0)), sp).labels == (0, 1, 1, 0, 0, 1, 1, 0)
    assert complete_prefix(Walk.from_labels(g, 0, (1, 1, 0, 0)), sp).labels == (1, 1, 0, 0, 0, 1, 1, 0)
    with pytest.raises(PoolError):
        complete_prefix(Walk.from_labels(g, 0, (0, 0, 0, 0)), sp)


def test_single_loop_completion():
    g = single_loop_graph()
    ch = uniform_chain(g)
    # P_min = 1, so zeta < (3/2) works; a single edge keeps frequency 1 at every length
    sp = PoolSpec(quantize_n_integral(ch, 5), F(2, 5), F(1, 2), 0)
    assert complete_prefix(Walk(g, 0, (0, 0)), sp).path == (0,) * 5


def test_census_examples():
    assert labels("db2", [c.labels for c in pool("db2", 8)]) == ["01100110", "11000110"]
    assert labels("fb", [c.labels for c in pool("fb", 4, F(1, 2), F(1, 4))]) == ["0101", "1001"]


@pytest.mark.parametrize("name, n, alpha, zeta", CASES)
def test_enumeration_matches_brute_force(name, n, alpha, zeta):
    sp = spec(name, n, alpha, zeta)
    got = [c.labels for c in enumerate_pool(sp)]
    want = brute_force_pool(sp.graph, sp.chain.edge_prob, sp.ichain.counts, alpha, zeta, 0)
    assert sorted(got) == want
    assert len(set(got)) == len(got)
    assert count_admissible_prefixes(sp) == len(got)
    prefixes = [c.prefix for c in enumerate_pool(sp)]
    assert prefixes == sorted(prefixes)


@pytest.mark.parametrize("name, n, alpha, zeta", CASES)
def test_every_codeword_satisfies_the_weak_constraint(name, n, alpha, zeta):
    sp = spec(name, n, alpha, zeta)
    for c in pool(name, n, alpha, zeta):
        assert verify_weak_constraint(c, sp.ichain, root=0)


def test_empty_pool_and_budget():
    sp = spec("fb", 6, F(1, 2), F(1, 10))  # band (1.2, 1.8) holds no integer
    assert enumerate_pool(sp) == []
    with pytest.raises(SamplingBudgetExhausted):
        sample_codeword(sp, seed=0, budget=1000)


def test_limit():
    with pytest.raises(PoolLimitExceeded):
        enumerate_pool(spec("db2", 16, F(1, 2), F(1, 5)), limit=10)


def test_sampler_returns_pool_members():
    members = {c.labels for c in pool("db2", 8)}
    for seed in range(30):
        c, rejected = sample_codeword(spec("db2", 8), seed)
        assert c.labels in members and rejected >= 0


def test_sampler_is_seeded():
    sp = spec("gm", 15, F(1, 2), F(1, 4))
    assert sample_codeword(sp, 7) == sample_codeword(sp, 7)


def test_sampler_deterministic_cycle():
    g = parse_graph("alphabet 0 1\nvertex a\nvertex b\nedge a b 0\nedge b a 1\n")
    sp = PoolSpec(quantize_n_integral(uniform_chain(g), 4), F(1, 2), F(1, 4), 0)
    for seed in range(5):
        c, rejected = sample_codeword(sp, seed)
        assert c.labels == (0, 1, 0, 1) and rejected == 0


def test_verify_weak_constraint_detects_swaps():
    sp = spec("db2", 8)
    c = pool("db2", 8)[0]
    swapped = list(c.labels)
    swapped[0], swapped[1] = swapped[1], swapped[0]
    g = sp.graph
    fake = Codeword(tuple(swapped), g.trace(0, swapped), c.prefix_len)
    assert not verify_weak_constraint(fake, sp.ichain)


def test_concatenated_codewords_are_2n_integral():
    sp = spec("db2", 8)
    a, b = pool("db2", 8)
    joined = Codeword(a.labels + b.labels, a.path + b.path, 0)
    assert verify_weak_constraint(joined, sp.ichain.scaled(2), root=0)


def test_prefix_probability():
    sp = spec("gm", 15, F(1, 2), F(1, 4))
    total = sum(prefix_probability(sp.chain, c) for c in pool("gm", 15, F(1, 2), F(1, 4)))
    assert 0 < total < 1
    db2 = spec("db2", 8).chain
    assert all(prefix_probability(db2, c) == F(1, 2) ** 4 for c in pool("db2", 8))


def test_walk_sampler_statistics():
    ch = chain("gm")
    rng = np.random.default_rng(1)
    walks = WalkSampler(ch).walks(0, 2000, 20, rng)
    freq = edge_counts(walks, 3).sum(axis=0) / walks.size
    assert freq == pytest.approx([float(p) for p in ch.edge_prob], abs=0.01)
    g = ch.graph
    assert all(g.edges[a].dst == g.edges[b].src for a, b in zip(walks[0], walks[0][1:]))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CASES), st.integers(0, 2**32))
def test_sampled_codewords_are_exact(case, seed):
    name, n, alpha, zeta = case
    sp = spec(name, n, alpha, zeta)
    members = {c.labels for c in pool(name, n, alpha, zeta)}
    if not members:
        return
    c, _ = sample_codeword(sp, seed)
    assert c.labels in members
    assert verify_weak_constraint(c, sp.ichain, root=0)


def test_integral_chain_dependency():
    ic = IntegralChain(8, (2, 2, 2, 2), chain("db2"))
    assert ic.as_chain() == MarkovChain(graph("db2"), (F(1, 4),) * 4)
