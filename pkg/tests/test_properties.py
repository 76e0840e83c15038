"""Randomised invariants."""

import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from wiretap_ot import gf2
from wiretap_ot import transcript as tx
from wiretap_ot.analysis import provisioning_probability, restricted_entropy
from wiretap_ot.analysis.privacy import distance_by_pattern
from wiretap_ot.capacity import c1p, c2p
from wiretap_ot.channel import ERASED, ChannelParams
from wiretap_ot.errors import ProvisioningError
from wiretap_ot.keymat import build_key_material, decrypt_string, sample_code
from wiretap_ot.protocol import ProtocolParams, bob_select_sets, run_protocol

prob = st.floats(0.0, 1.0, allow_nan=False)
open_prob = st.floats(0.01, 0.99, allow_nan=False)


@given(prob, prob)
def test_capacity_ordering_and_bounds(e1, e2):
    eps = ChannelParams(e1, e2)
    assert 0 <= c2p(eps) <= c1p(eps) + 1e-15
    assert c1p(eps) <= e2 / 2 + 1e-15
    assert c1p(eps) <= e2 * (1 - e1) + 1e-15
    assert c1p(eps) <= e1 + 1e-15
    assert c2p(eps) <= e1 * e2 + 1e-15


@given(open_prob, st.integers(1, 9), st.integers(2, 10), st.integers(1, 60))
def test_provisioning_nondecreasing_once_gap_is_a_standard_deviation(eps, a, b, j):
    assume(a < b and a / b < eps)
    n = b * j
    z = (eps - a / b) * math.sqrt(n / (eps * (1 - eps)))
    assume(z >= 1.0)
    assert provisioning_probability(n + b, eps, a * j + a) >= provisioning_probability(n, eps, a * j) - 1e-15


def test_provisioning_can_dip_at_small_n():
    # the atom at the threshold dominates early: P[Bin(2j, .55) >= j] falls at first
    assert provisioning_probability(4, 0.55, 2) < provisioning_probability(2, 0.55, 1)


@given(st.integers(0, 2000), open_prob, st.integers(0, 2000))
def test_provisioning_is_a_probability(n, eps, t):
    v = provisioning_probability(n, eps, min(t, n + 1))
    assert 0.0 <= v <= 1.0


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_rank_properties(r, c, seed):
    m = np.random.default_rng(seed).integers(0, 2, (r, c), dtype=np.uint8)
    rk = gf2.rank(m)
    assert rk <= min(r, c) and rk == gf2.rank(m.T)


@given(st.lists(st.binary(max_size=20), max_size=5))
def test_transcript_roundtrip(payloads):
    t = tx.Transcript()
    for i, p in enumerate(payloads):
        t.append(tx.ALICE if i % 2 == 0 else tx.BOB, p)
    back = tx.Transcript.from_json(t.to_json())
    assert [m.payload for m in back] == payloads


@settings(max_examples=50)
@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_encrypt_decrypt_roundtrip(k, extra, seed):
    m = k + extra
    rng = np.random.default_rng(seed)
    code = sample_code(k, m, seed)
    t0, t1, k0, k1 = rng.integers(0, 2, (4, m), dtype=np.uint8)
    s0, s1 = rng.integers(0, 2, (2, k), dtype=np.uint8)
    km = build_key_material(t0, t1, s0, s1, code, k0, k1)
    assert np.array_equal(decrypt_string(km.Ktilde0, t0, km.Stilde0), k0)
    assert np.array_equal(decrypt_string(km.Ktilde1, t1, km.Stilde1), k1)


@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.integers(20, 200),
    st.sampled_from(["2p", "1p"]),
    open_prob,
    st.floats(0.2, 1.0),
    st.integers(0, 2**32 - 1),
)
def test_bob_sets_respect_pools(n, mode, e1, e2, seed):
    p = ProtocolParams(n, 1 / n, 0.1, ChannelParams(e1, e2), mode=mode, seed=seed)
    rng = np.random.default_rng(seed)
    y = np.where(rng.random(n) < e1, ERASED, 0).astype(np.int8)
    num_erased = int((y == ERASED).sum())
    try:
        sets = bob_select_sets(y, p, rng=rng)
    except ProvisioningError:
        assert not p.provisioned(num_erased)
        return
    assert p.provisioned(num_erased)
    parts = [v.tolist() for v in sets.as_tuple()]
    flat = sum(parts, [])
    assert len(flat) == len(set(flat)) == 2 * (p.m + p.s)
    assert all(y[i] != ERASED for i in parts[0] + parts[2])
    assert all(y[i] == ERASED for i in parts[1])


@settings(max_examples=25, deadline=None)
@given(
    st.integers(60, 400),
    st.sampled_from(["2p", "1p"]),
    st.floats(0.05, 0.95),
    st.floats(0.3, 1.0),
    st.integers(0, 2**32 - 1),
    st.integers(0, 1),
)
def test_every_provisioned_run_decodes(n, mode, e1, e2, seed, c):
    p = ProtocolParams(n, 0.02, 0.1, ChannelParams(e1, e2), mode=mode, seed=seed)
    rng = np.random.default_rng(seed)
    k0, k1 = rng.integers(0, 2, (2, p.m), dtype=np.uint8)
    out = run_protocol(p, c, k0, k1)
    if out.J:
        assert np.array_equal(out.khat_c, (k0, k1)[c])
    else:
        assert out.aborted


@settings(max_examples=30)
@given(st.integers(4, 14), st.integers(0, 2**32 - 1), st.data())
def test_restricted_entropy_bounds(n, seed, data):
    rng = np.random.default_rng(seed)
    size = data.draw(st.integers(1, 64))
    book = rng.integers(0, 1 << n, size=size)
    j = data.draw(st.integers(1, n))
    subset = np.sort(rng.choice(n, j, replace=False))
    h = restricted_entropy(book, subset)
    assert -1e-12 <= h <= min(j, math.log2(size)) + 1e-12


def test_distance_lies_between_zero_and_one_minus_two_to_minus_k():
    d = distance_by_pattern(6, 2)
    assert np.all(d >= -1e-15) and np.all(d <= 1 - 2.0**-2 + 1e-15)
