import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from common import chain, concat_params, pool, spec
from wcc.concat import (
    ConcatError,
    ConcatParams,
    concat_decode,
    concat_decode_detail,
    concat_encode,
    concat_encode_path,
    is_weakly_constrained,
    scale_plan,
)
from wcc.pool import Codeword, PoolTemplate, verify_weak_constraint
from wcc.rs import DecodeFailure


def test_db2_parameters():
    cp = concat_params("db2")
    assert (cp.ec_size, cp.q, cp.rs.g, cp.k) == (10, 7, 3, 3)
    assert (cp.n, cp.d_in, cp.n_out, cp.d_out, cp.n_con, cp.d_con) == (24, 6, 6, 4, 144, 24)
    assert cp.r_out == F(1, 2)
    assert cp.table == cp.inner[:7]


def test_gm_parameters():
    cp = concat_params("gm")
    assert (cp.ec_size, cp.q, cp.n, cp.d_in, cp.d_out) == (15, 13, 20, 4, 9)


def test_concatenated_distance_is_at_least_product():
    cp = concat_params("db2")
    words = np.array([concat_encode(m, cp) for m in itertools.product(range(7), repeat=3)])
    dmin = min(int((words[i] != words[i + 1 :]).sum(axis=1).min()) for i in range(len(words) - 1))
    assert dmin >= cp.d_con


@pytest.mark.parametrize("key", ["db2", "gm"])
def test_round_trip_and_weak_constraint(key):
    cp = concat_params(key)
    rng = random.Random(11)
    for _ in range(200):
        msg = tuple(rng.randrange(cp.q) for _ in range(cp.k))
        labels, path = concat_encode_path(msg, cp)
        assert is_weakly_constrained(cp, labels, path)
        assert concat_decode(labels, cp) == msg


def test_output_is_integral_for_scaled_chain():
    cp = concat_params("db2")
    sp = spec("db2", 24, F(1, 2), F(1, 10))
    labels, path = concat_encode_path((1, 5, 2), cp)
    assert verify_weak_constraint(Codeword(labels, path, 0), sp.ichain.scaled(cp.n_out), root=0)


def test_constant_message():
    cp = concat_params("db2", k=1)
    for c in range(cp.q):
        assert concat_encode((c,), cp) == cp.table[c].labels * cp.n_out


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_guaranteed_pattern_corrected(data):
    cp = concat_params(data.draw(st.sampled_from(["db2", "gm"])))
    na = len(cp.graph.alphabet)
    msg = tuple(data.draw(st.integers(0, cp.q - 1)) for _ in range(cp.k))
    word = list(concat_encode(msg, cp))
    blocks = data.draw(st.lists(st.integers(0, cp.n_out - 1), unique=True, max_size=cp.rs.radius))
    per_block = (cp.d_in - 1) // 2
    for b in blocks:
        pos = data.draw(st.lists(st.integers(0, cp.n - 1), unique=True, max_size=per_block))
        for p in pos:
            word[b * cp.n + p] = (word[b * cp.n + p] + data.draw(st.integers(1, na - 1))) % na
    assert concat_decode(word, cp) == msg


def test_decode_failure_reported():
    cp = concat_params("db2")
    word = list(concat_encode((0, 0, 0), cp))
    # replace three of six blocks by a different inner codeword
    for b in range(3):
        word[b * cp.n : (b + 1) * cp.n] = cp.table[(b + 1) % cp.q].labels
    res = concat_decode_detail(word, cp)
    assert res.message != (0, 0, 0)
    if res.message is None:
        with pytest.raises(DecodeFailure):
            concat_decode(word, cp)


def test_decode_validates_input():
    cp = concat_params("db2")
    with pytest.raises(ConcatError):
        concat_decode([0] * 10, cp)
    with pytest.raises(ConcatError):
        concat_decode([7] * cp.n_con, cp)


def test_inner_code_checks():
    cp = concat_params("db2")
    with pytest.raises(ConcatError):
        ConcatParams(cp.graph, 0, (), 3)
    other = pool("db2", 8)
    with pytest.raises(ConcatError):
        ConcatParams(cp.graph, 0, cp.inner[:3] + (other[0],), 1)
    with pytest.raises(ValueError):
        ConcatParams(cp.graph, 0, cp.inner[:2], 1)


def test_scale_plan():
    t = PoolTemplate(chain("db2"), F(1, 2), F(1, 10), 0)
    plan = scale_plan(2**20, 2.0, t)
    assert plan.n == 40 and plan.r_in == pytest.approx(0.5)
    assert plan.log2_q_bound == pytest.approx(40 * 0.5)
    with pytest.raises(ConcatError):
        scale_plan(2**20, 0.1, t)  # n = 2 < |E| = 4
