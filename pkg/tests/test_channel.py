import math

import numpy as np
import pytest
from scipy.stats import binom

from common import concat_params
from wcc.channel import ChannelModel, binomial_tail, simulate_channel


def test_noiseless_channel():
    rep = simulate_channel(concat_params("db2"), ChannelModel(0.0), 200, seed=1)
    assert rep.message_errors == 0 and rep.inner_failures == 0 and rep.decode_failures == 0
    assert rep.guaranteed_trials == 200


def test_very_noisy_channel():
    rep = simulate_channel(concat_params("db2"), ChannelModel(0.5), 300, seed=2)
    assert rep.message_error_rate > 0.9
    assert rep.guaranteed_violations == 0


def test_corrupt_always_changes_hit_symbols():
    rng = np.random.default_rng(0)
    words = np.zeros((1000, 20), dtype=np.int64)
    out = ChannelModel(1.0).corrupt(words, 4, rng)
    assert (out != 0).all() and out.max() < 4


def test_gm_channel_matches_binomial_tail():
    cp = concat_params("gm")
    p = 0.01
    rep = simulate_channel(cp, ChannelModel(p), 1000, seed=3)
    k = math.ceil(cp.d_in / 2)
    tail = float(binom.sf(k - 1, cp.n, p))
    assert binomial_tail(cp.n, p, k) == pytest.approx(tail, rel=1e-12)
    heavy = sum(h * c for h, c in rep.heavy_block_histogram)
    blocks = rep.inner_blocks
    sigma = math.sqrt(tail * (1 - tail) / blocks)
    assert abs(heavy / blocks - tail) <= 3 * sigma
    # minimum-distance decoding fails only on blocks at or beyond half the inner distance
    assert rep.inner_failures <= heavy
    assert rep.inner_failure_rate <= tail + 3 * sigma
    assert rep.guaranteed_violations == 0
    assert rep.message_errors <= rep.trials - rep.guaranteed_trials


def test_report_is_seeded():
    cp = concat_params("db2")
    a = simulate_channel(cp, ChannelModel(0.05), 100, seed=9)
    b = simulate_channel(cp, ChannelModel(0.05), 100, seed=9)
    assert a == b and a.lines() == b.lines()


def test_channel_validation():
    with pytest.raises(ValueError):
        ChannelModel(1.5)
    with pytest.raises(ValueError):
        simulate_channel(concat_params("db2"), ChannelModel(0.1), 0)
