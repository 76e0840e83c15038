import numpy as np
import pytest

from wiretap_ot.analysis import code_entropy_experiment, restricted_entropy
from wiretap_ot.analysis.codes import codebook_ints
from wiretap_ot.errors import BudgetExceeded


def test_full_space_codebook_restricts_uniformly():
    n = 10
    book = np.arange(1 << n, dtype=np.int64)
    rng = np.random.default_rng(0)
    for size in (1, 4, 10):
        subset = np.sort(rng.choice(n, size, replace=False))
        assert restricted_entropy(book, subset) == pytest.approx(size, abs=1e-12)


def test_two_dimensional_codebook_input():
    rows = np.array([[0, 0, 1], [1, 0, 1], [0, 1, 1], [1, 1, 1]])
    assert codebook_ints(rows).tolist() == [4, 5, 6, 7]
    assert restricted_entropy(rows, [0, 1]) == pytest.approx(2.0)
    assert restricted_entropy(rows, [2]) == 0.0


@pytest.mark.parametrize(
    "r, r_prime, beta",
    [(0.4, 0.7, 0.3), (0.4, 0.7, 0.0), (0.7, 0.4, 0.1), (0.0, 0.5, 0.1), (0.4, 1.0, 0.1)],
)
def test_precondition_rejection(r, r_prime, beta):
    with pytest.raises(ValueError):
        code_entropy_experiment(20, r, r_prime, beta, 1, 1)


def test_budget():
    with pytest.raises(BudgetExceeded):
        code_entropy_experiment(40, 0.2, 0.7, 0.1, 1, 1)


def test_zero_codes_gives_empty_report():
    rep = code_entropy_experiment(20, 0.4, 0.7, 0.2, 0, 100)
    assert rep.pass_fraction is None and rep.min_entropy_seen is None
    assert rep.codes_tested == 0 and rep.threshold == pytest.approx(8 - 2**-4)


def test_deterministic_in_seed():
    a = code_entropy_experiment(14, 0.3, 0.6, 0.1, 3, 5, seed=4)
    b = code_entropy_experiment(14, 0.3, 0.6, 0.1, 3, 5, seed=4)
    assert a == b


def test_linear_ensemble_restrictions_are_subspace_uniform():
    rep = code_entropy_experiment(12, 0.25, 0.5, 0.1, 20, 20, seed=1, ensemble="linear")
    assert rep.min_entropy_seen == pytest.approx(round(rep.min_entropy_seen), abs=1e-9)
    assert rep.pass_fraction is not None and 0 < rep.pass_fraction <= 1


def test_unknown_ensemble():
    with pytest.raises(ValueError):
        code_entropy_experiment(12, 0.25, 0.5, 0.1, 1, 1, ensemble="nope")
