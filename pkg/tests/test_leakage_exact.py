from collections import defaultdict

import numpy as np
import pytest

from oracles import brute_force_for
from wiretap_ot.analysis import exact_leakage
from wiretap_ot.analysis.leakage import FIELDS, _core_distribution
from wiretap_ot.channel import ChannelParams
from wiretap_ot.errors import TooLarge
from wiretap_ot.protocol import ProtocolParams, public_parameters

V_STAR_PARAMS = ProtocolParams(6, 1 / 6, 0.1, ChannelParams(0.5, 0.5))
# pinned once the closed form and the brute-force oracle agreed
V_STAR_PINNED = 0.25

SMALL = {
    "2p": ProtocolParams(5, 0.2, 0.1, ChannelParams(0.5, 0.9)),
    "1p-unerased": ProtocolParams(5, 0.2, 0.1, ChannelParams(0.2, 0.6), mode="1p"),
    "1p-mixed": ProtocolParams(5, 0.2, 0.1, ChannelParams(0.45, 0.8), mode="1p"),
    "1p-erased": ProtocolParams(5, 0.2, 0.1, ChannelParams(0.7, 0.6), mode="1p"),
}


def v_star_closed_form(p: ProtocolParams) -> float:
    """I(K_Cbar; V, W) when m = k = 1 and the expansion code is the identity.

    On the Cbar side Bob's view is all erasures, so the pad x_T xor h . x_S is
    known exactly when Eve sees x_T and every S bit that h touches, and is
    uniform otherwise.
    """
    pub = public_parameters(p)
    assert p.m == 1 and p.k == 1 and pub.code.generator.tolist() == [[1]]
    weight = int(pub.hash.matrix.sum())
    return (1 - p.eps.eps2) ** (1 + weight)


def test_v_star_config_shape():
    assert (V_STAR_PARAMS.m, V_STAR_PARAMS.s, V_STAR_PARAMS.k) == (1, 2, 1)


def test_v_star_matches_closed_form_and_pin():
    rep = exact_leakage(V_STAR_PARAMS)
    assert rep.i_kcbar_given_bob_eve == pytest.approx(v_star_closed_form(V_STAR_PARAMS), abs=1e-12)
    assert rep.i_kcbar_given_bob_eve == pytest.approx(V_STAR_PINNED, abs=1e-12)


@pytest.mark.slow
def test_v_star_matches_brute_force_oracle():
    rep = exact_leakage(V_STAR_PARAMS)
    ref = brute_force_for(V_STAR_PARAMS)
    assert rep.p_j1 == pytest.approx(ref["p_j1"], abs=1e-12)
    for f in FIELDS:
        assert getattr(rep, f) == pytest.approx(ref[f], abs=1e-9), f


@pytest.mark.slow
@pytest.mark.parametrize("name", ["2p", "1p-mixed"])
def test_small_configs_match_brute_force_oracle(name):
    p = SMALL[name]
    rep = exact_leakage(p)
    ref = brute_force_for(p)
    assert rep.p_j1 == pytest.approx(ref["p_j1"], abs=1e-12)
    for f in FIELDS:
        assert getattr(rep, f) == pytest.approx(ref[f], abs=1e-9), f


@pytest.mark.parametrize("name", sorted(SMALL))
def test_alice_learns_nothing_about_choice(name):
    p = SMALL[name]
    assert p.active_regime is None or p.active_regime.value == name.split("-")[1]
    rep = exact_leakage(p)
    assert rep.i_c_given_aliceview <= 1e-12
    assert rep.i_kcbar_given_bob <= 1e-12
    for f in FIELDS:
        v = getattr(rep, f)
        assert np.isfinite(v) and v >= 0


@pytest.mark.parametrize("name", sorted(SMALL))
def test_published_sets_have_same_law_under_both_choices(name):
    groups, _ = _core_distribution(SMALL[name])
    law = defaultdict(lambda: [0.0, 0.0])
    for L, entries in groups.items():
        for (c, _), w in entries.items():
            law[L][c] += w
    for w0, w1 in law.values():
        assert w0 == pytest.approx(w1, abs=1e-15)


def test_eve_sees_only_erasures():
    p = ProtocolParams(5, 0.2, 0.1, ChannelParams(0.5, 1.0))
    rep = exact_leakage(p)
    assert rep.i_keys_choice_given_eve <= 1e-12


def test_size_limits():
    with pytest.raises(TooLarge):
        exact_leakage(ProtocolParams(30, 0.1, 0.1, ChannelParams(0.5, 0.5)))
    with pytest.raises(TooLarge):
        exact_leakage(ProtocolParams(8, 3 / 8, 0.1, ChannelParams(0.5, 0.99)))
    with pytest.raises(TooLarge):
        exact_leakage(V_STAR_PARAMS, budget=1000)
    with pytest.raises(TooLarge):
        exact_leakage(V_STAR_PARAMS, n_max_exact=5)


def test_report_fields_and_json():
    rep = exact_leakage(SMALL["2p"])
    d = rep.to_dict()
    assert d["method"] == "ExactEnumeration" and d["n"] == 5 and d["m"] == 1
    assert d["trials"] is None
    assert rep.per_bit() == pytest.approx(rep.i_keys_choice_given_eve / 5)
