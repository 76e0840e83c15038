"""Entropy of random codebooks restricted to coordinate subsets.

A codebook of 2**(n r') codewords is drawn, a subset J of ceil(n r)
coordinates is picked, and the entropy of the empirical distribution of the
codewords restricted to J is compared with n r - 2**(-n beta).

Two ensembles are available. ``"iid"`` draws every codeword independently
and uniformly from {0,1}^n. ``"linear"`` takes all messages through a
generator from :func:`keymat.sample_code` with i.i.d. uniform entries and no
full-rank resampling; its restrictions are exactly uniform or lose at least
a bit, so it fails the threshold whenever the restricted generator is rank
deficient.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import BudgetExceeded
from ..info import entropy_bits
from ..keymat import sample_code

MAX_CODE_BITS = 24
ENSEMBLES = ("iid", "linear")


@dataclass(frozen=True)
class CodeEntropyReport:
    n: int
    r: float
    r_prime: float
    beta: float
    codes_tested: int
    subsets_per_code: int
    pass_fraction: float | None  # None when nothing was tested
    min_entropy_seen: float | None
    threshold: float
    subset_size: int
    code_bits: int
    ensemble: str
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _check_parameters(n: int, r: float, r_prime: float, beta: float) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 < r < r_prime < 1:
        raise ValueError(f"need 0 < r < r' < 1, got r={r}, r'={r_prime}")
    if not 0 < beta < r_prime - r:
        raise ValueError(f"need 0 < beta < r' - r = {r_prime - r}, got {beta}")
    if n * r_prime > MAX_CODE_BITS + 1e-9:
        raise BudgetExceeded(f"2^{n * r_prime:g} codewords exceed the 2^{MAX_CODE_BITS} budget")


def codebook_ints(codewords: np.ndarray) -> np.ndarray:
    """Pack 0/1 codeword rows into integers, column j as bit j."""
    codewords = np.asarray(codewords, dtype=np.int64)
    return codewords @ (np.int64(1) << np.arange(codewords.shape[1], dtype=np.int64))


def restricted_entropy(codebook: np.ndarray, subset) -> float:
    """Entropy of the empirical law of codewords restricted to ``subset``.

    ``codebook`` is either a 2-D 0/1 array (one codeword per row) or a 1-D
    array of packed codewords (bit j = coordinate j).
    """
    subset = np.asarray(subset, dtype=np.int64)
    book = np.asarray(codebook)
    if book.ndim == 2:
        book = codebook_ints(book)
    bits = (book[:, None] >> subset[None, :]) & 1
    keys = bits @ (np.int64(1) << np.arange(subset.size, dtype=np.int64))
    counts = np.bincount(keys, minlength=1 << subset.size)
    return float(entropy_bits(counts / counts.sum()))


def _sample_codebook(n: int, k: int, ensemble: str, rng: np.random.Generator) -> np.ndarray:
    if ensemble == "iid":
        return rng.integers(0, 1 << n, size=1 << k, dtype=np.int64)
    seed = int(rng.integers(0, 2**63 - 1))
    g = sample_code(k, n, seed, full_rank=False).generator.astype(np.int64)
    rows = codebook_ints(g)
    book = np.zeros(1 << k, dtype=np.int64)
    # Gray-code walk: each message differs from the previous one in one row
    for i in range(1, 1 << k):
        j = ((i ^ (i >> 1)) ^ ((i - 1) ^ ((i - 1) >> 1))).bit_length() - 1
        book[i] = book[i - 1] ^ rows[j]
    return book


def code_entropy_experiment(
    n: int,
    r: float,
    r_prime: float,
    beta: float,
    codes: int,
    subsets: int,
    seed: int = 0,
    ensemble: str = "iid",
) -> CodeEntropyReport:
    """Pass fraction of the restricted-entropy test over random codes and subsets.

    Raises
    ------
    ValueError
        On parameters outside 0 < r < r' < 1 and 0 < beta < r' - r.
    BudgetExceeded
        When n r' > 24.
    """
    _check_parameters(n, r, r_prime, beta)
    if ensemble not in ENSEMBLES:
        raise ValueError(f"ensemble must be one of {ENSEMBLES}")
    if codes < 0 or subsets < 0:
        raise ValueError("counts must be nonnegative")
    k = math.ceil(n * r_prime - 1e-9)
    j = math.ceil(n * r - 1e-9)
    threshold = n * r - 2.0 ** (-n * beta)
    rng = np.random.default_rng(seed)
    passes, tested, low = 0, 0, math.inf
    for _ in range(codes):
        book = _sample_codebook(n, k, ensemble, rng)
        for _ in range(subsets):
            subset = np.sort(rng.choice(n, size=j, replace=False))
            h = restricted_entropy(book, subset)
            passes += h >= threshold
            tested += 1
            low = min(low, h)
    return CodeEntropyReport(
        n=n,
        r=r,
        r_prime=r_prime,
        beta=beta,
        codes_tested=codes,
        subsets_per_code=subsets,
        pass_fraction=passes / tested if tested else None,
        min_entropy_seen=low if tested else None,
        threshold=threshold,
        subset_size=j,
        code_bits=k,
        ensemble=ensemble,
        seed=seed,
    )
