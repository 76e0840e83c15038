import math

import pytest

from oracles import binomial_tail_mp
from wiretap_ot.analysis import bob_provisioning, eve_erasure_provisioning, provisioning_probability
from wiretap_ot.channel import ChannelParams
from wiretap_ot.protocol import ProtocolParams


def test_trivial_thresholds():
    assert provisioning_probability(50, 0.3, 0) == 1.0
    assert provisioning_probability(50, 0.3, 51) == 0.0
    assert provisioning_probability(50, 0.0, 1) == 0.0
    assert provisioning_probability(50, 1.0, 50) == 1.0


def test_matches_high_precision_oracle():
    assert provisioning_probability(1000, 0.5, 450) == pytest.approx(binomial_tail_mp(1000, 0.5, 450), abs=1e-10)
    for n, eps, t in [(200, 0.3, 80), (200, 0.3, 40), (5000, 0.45, 2200), (37, 0.9, 35)]:
        assert provisioning_probability(n, eps, t) == pytest.approx(binomial_tail_mp(n, eps, t), abs=1e-12)


def test_small_case_by_hand():
    # P[Bin(3, 1/2) >= 2] = 4 / 8
    assert provisioning_probability(3, 0.5, 2) == pytest.approx(0.5, abs=1e-15)
    assert provisioning_probability(3, 0.5, 1.2) == pytest.approx(0.5, abs=1e-15)  # rounded up to 2
    assert provisioning_probability(3, 0.5, 1) == pytest.approx(7 / 8, abs=1e-15)


def test_input_validation():
    with pytest.raises(ValueError):
        provisioning_probability(-1, 0.5, 0)
    with pytest.raises(ValueError):
        provisioning_probability(10, 1.5, 0)


def test_eve_event_converges_to_one():
    vals = [eve_erasure_provisioning(n, 0.5, 0.1) for n in (100, 500, 1000, 5000)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 1 - 1e-9


def test_bob_provisioning_sums_the_right_counts():
    p = ProtocolParams(12, 1 / 12, 0.1, ChannelParams(0.5, 0.5))
    need_e, need_u, _ = p.required_pools()
    expected = sum(math.comb(12, e) for e in range(need_e, 12 - need_u + 1)) / 2**12
    assert bob_provisioning(p) == pytest.approx(expected, abs=1e-15)
