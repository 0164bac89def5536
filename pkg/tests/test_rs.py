import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import min_hamming, poly_eval_codeword
from wcc.rs import DecodeFailure, RSCode, is_prime, primitive_element, select_field


def test_select_field():
    assert select_field(10) == 7
    assert select_field(7) == 7
    assert select_field(14) == 13
    with pytest.raises(ValueError):
        select_field(2)


@pytest.mark.parametrize("n", range(3, 200))
def test_select_field_bertrand(n):
    q = select_field(n)
    assert is_prime(q) and n / 2 < q <= n
    assert not any(is_prime(x) for x in range(q + 1, n + 1))


def test_primitive_elements():
    assert primitive_element(7) == 3
    assert primitive_element(11) == 2
    for q in (3, 5, 7, 11, 13, 17, 19, 23):
        g = primitive_element(q)
        assert len({pow(g, j, q) for j in range(q - 1)}) == q - 1


def test_encode_examples():
    rs = RSCode(7, 3)
    assert rs.g == 3 and rs.points == (1, 3, 2, 6, 4, 5)
    assert rs.encode((0, 0, 0)) == (0,) * 6
    assert rs.encode((1, 2, 3)) == (6, 6, 3, 2, 1, 2)
    assert rs.encode((1, 2, 3)) == poly_eval_codeword((1, 2, 3), 7, 3)
    one = RSCode(7, 1)
    assert one.encode((4,)) == (4,) * 6 and one.distance == 6


def test_parameters():
    rs = RSCode(11, 4)
    assert (rs.length, rs.distance, rs.radius) == (10, 7, 3)
    with pytest.raises(ValueError):
        RSCode(8, 2)
    with pytest.raises(ValueError):
        RSCode(7, 7)


@pytest.mark.parametrize("q, k", [(5, 2), (7, 3), (7, 2)])
def test_min_distance_small(q, k):
    rs = RSCode(q, k)
    words = [rs.encode(m) for m in itertools.product(range(q), repeat=k)]
    assert min_hamming(words) == rs.distance


def test_decode_clean_and_random_errors():
    rs = RSCode(13, 4)
    rng = random.Random(5)
    for _ in range(1000):
        msg = tuple(rng.randrange(13) for _ in range(4))
        word = list(rs.encode(msg))
        for pos in rng.sample(range(12), rs.radius):
            word[pos] = (word[pos] + rng.randrange(1, 13)) % 13
        assert rs.decode(word) == msg
        assert rs.decode(rs.encode(msg)) == msg


def test_exhaustive_correction_q7_k3():
    rs = RSCode(7, 3)
    for msg in itertools.product(range(7), repeat=3):
        cw = rs.encode(msg)
        assert rs.decode(cw) == msg
        for pos in range(6):
            for shift in range(1, 7):
                w = list(cw)
                w[pos] = (w[pos] + shift) % 7
                assert rs.decode(w) == msg


def test_beyond_radius_never_crashes():
    """q = 7, K = 5 has radius 0: every single error must be reported or miscorrected."""
    rs = RSCode(7, 5)
    wrong = fail = 0
    for msg in itertools.product(range(7), repeat=5):
        cw = rs.encode(msg)
        for pos in range(6):
            w = list(cw)
            w[pos] = (w[pos] + 1) % 7
            try:
                out = rs.decode(w)
            except DecodeFailure:
                fail += 1
            else:
                assert out != msg
                wrong += 1
    assert fail + wrong == 7**5 * 6 and fail > 0


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(7, 2), (11, 3), (13, 5)]), st.data())
def test_decoder_is_bounded_distance(qk, data):
    q, k = qk
    rs = RSCode(q, k)
    word = data.draw(st.lists(st.integers(0, q - 1), min_size=q - 1, max_size=q - 1))
    try:
        msg = rs.decode(word)
    except DecodeFailure:
        return
    assert sum(a != b for a, b in zip(rs.encode(msg), word)) <= rs.radius


def test_input_validation():
    rs = RSCode(7, 3)
    with pytest.raises(ValueError):
        rs.encode((1, 2))
    with pytest.raises(ValueError):
        rs.decode((0,) * 5)
    with pytest.raises(ValueError):
        rs.encode((1, 2, 9))
