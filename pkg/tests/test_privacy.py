import numpy as np
import pytest

from wiretap_ot.analysis.privacy import (
    amplification_profile,
    distance_bruteforce,
    distance_by_pattern,
    pairwise_independent,
    toeplitz_collision_probability,
)
from wiretap_ot.keymat import toeplitz_matrix


def _matrix(seed: int, s: int, k: int) -> np.ndarray:
    d = np.array([(seed >> t) & 1 for t in range(k + s - 1)], dtype=np.uint8)
    return toeplitz_matrix(d, k, s)


def test_span_method_matches_listing_every_input():
    s, k = 5, 2
    fast = distance_by_pattern(s, k)
    for pattern in range(1 << s):
        hidden = np.array([(pattern >> j) & 1 for j in range(s)], dtype=bool)
        slow = np.mean([distance_bruteforce(_matrix(seed, s, k), hidden) for seed in range(1 << (k + s - 1))])
        assert fast[pattern] == pytest.approx(slow, abs=1e-12)


def test_extremes():
    s, k = 6, 3
    by = distance_by_pattern(s, k)
    assert by[0] == pytest.approx(1 - 2.0**-k)  # Eve sees every input bit
    prof = amplification_profile(s, k, 1.0, by)
    assert prof.mean_distance == pytest.approx(by[-1])
    assert prof.distance_by_hidden_count[0] == pytest.approx(1 - 2.0**-k)


def test_distance_decreases_with_hidden_bits():
    prof = amplification_profile(8, 3, 0.5)
    d = prof.distance_by_hidden_count
    assert all(a >= b for a, b in zip(d, d[1:]))


def test_toeplitz_family_is_pairwise_independent():
    for s, k in ((6, 2), (8, 3), (10, 4)):
        assert toeplitz_collision_probability(s, k) == pytest.approx(2.0**-k, abs=1e-15)
        assert pairwise_independent(s, k)


def test_argument_checks():
    with pytest.raises(ValueError):
        amplification_profile(4, 5, 0.5)
