"""Exhaustive checks of Toeplitz privacy amplification at toy sizes.

A Toeplitz hash from s to k bits is indexed by its k + s - 1 diagonal bits
(seed ``d`` packs them with bit t = diagonal t). Column j of the matrix is
then the k-bit integer ``(d >> (s - 1 - j)) & (2**k - 1)``, which matches
``keymat.toeplitz_matrix``.

If Eve misses the input bits at positions ``hidden`` and sees the rest, the
key given her observation is uniform over a coset of the span of the hidden
columns, so its distance from uniform is exactly ``1 - 2**(rank - k)``.
Spans are tracked as bitmasks over all 2**k vectors, for every seed at once.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import TooLarge

MAX_SEED_BITS = 24


def _columns(s: int, k: int) -> list[np.ndarray]:
    if k > 6:
        raise TooLarge("span bitmasks support k <= 6")
    if k + s - 1 > MAX_SEED_BITS:
        raise TooLarge(f"{k + s - 1} seed bits exceed {MAX_SEED_BITS}")
    seeds = np.arange(1 << (k + s - 1), dtype=np.uint64)
    mask = np.uint64((1 << k) - 1)
    return [(seeds >> np.uint64(s - 1 - j)) & mask for j in range(s)]


def _block_masks(k: int) -> list[np.uint64]:
    # bit v set iff bit b of v is clear
    out = []
    for b in range(k):
        m = 0
        for v in range(1 << k):
            if not v >> b & 1:
                m |= 1 << v
        out.append(np.uint64(m))
    return out


def _translate(span: np.ndarray, c: np.ndarray, k: int, blocks) -> np.ndarray:
    """The set {v xor c : v in span}, per seed."""
    out = span.copy()
    for b in range(k):
        sh = np.uint64(1 << b)
        swapped = ((out & blocks[b]) << sh) | ((out >> sh) & blocks[b])
        out = np.where((c >> np.uint64(b)) & np.uint64(1), swapped, out)
    return out


def distance_by_pattern(s: int, k: int) -> np.ndarray:
    """Seed-averaged distance from uniform for every hidden-position pattern.

    Entry ``h`` (bit j set when position j is hidden from Eve) is the mean
    of ``1 - 2**(rank - k)`` over all 2**(k + s - 1) seeds.
    """
    cols = _columns(s, k)
    blocks = _block_masks(k)
    out = np.zeros(1 << s)

    def walk(j: int, pattern: int, span: np.ndarray) -> None:
        if j == s:
            rank = np.log2(np.bitwise_count(span).astype(float))
            out[pattern] = float(np.mean(1.0 - np.exp2(rank - k)))
            return
        walk(j + 1, pattern, span)
        walk(j + 1, pattern | 1 << j, span | _translate(span, cols[j], k, blocks))

    walk(0, 0, np.ones_like(cols[0]))  # span of nothing is {0}
    return out


@dataclass(frozen=True)
class AmplificationProfile:
    s: int
    k: int
    eps2: float
    mean_distance: float  # over seeds and Eve's erasure patterns
    bound: float  # 2 ** (-(s eps2 - k) / 2)
    distance_by_hidden_count: list  # index u: mean over seeds and patterns with u hidden

    @property
    def within_bound(self) -> bool:
        return self.mean_distance <= self.bound

    def to_dict(self) -> dict:
        return asdict(self)


def amplification_profile(
    s: int, k: int, eps2: float, by_pattern: np.ndarray | None = None
) -> AmplificationProfile:
    """Exact distance of the Toeplitz-extracted key from uniform given Eve.

    Each input bit is hidden from Eve independently with probability eps2.
    ``by_pattern`` may be passed to reuse :func:`distance_by_pattern`.
    """
    if not 0 < k <= s:
        raise ValueError("need 0 < k <= s")
    if by_pattern is None:
        by_pattern = distance_by_pattern(s, k)
    hidden = np.bitwise_count(np.arange(1 << s, dtype=np.uint64)).astype(int)
    weights = eps2**hidden * (1 - eps2) ** (s - hidden)
    by_count = [float(by_pattern[hidden == u].mean()) for u in range(s + 1)]
    return AmplificationProfile(
        s=s,
        k=k,
        eps2=eps2,
        mean_distance=float(weights @ by_pattern),
        bound=2.0 ** (-(s * eps2 - k) / 2),
        distance_by_hidden_count=by_count,
    )


def distance_bruteforce(h: np.ndarray, hidden: np.ndarray) -> float:
    """Distance of ``h @ x`` from uniform given ``x`` off ``hidden``, by listing every x."""
    h = np.asarray(h, dtype=np.uint8)
    k, s = h.shape
    hidden = np.asarray(hidden, dtype=bool)
    xs = ((np.arange(1 << s)[:, None] >> np.arange(s)) & 1).astype(np.uint8)
    keys = (xs @ h.T % 2) @ (1 << np.arange(k))
    seen = xs[:, ~hidden] @ (1 << np.arange(int((~hidden).sum()))) if (~hidden).any() else np.zeros(len(xs), int)
    total = 0.0
    groups = np.unique(seen)
    for g in groups:
        counts = np.bincount(keys[seen == g], minlength=1 << k)
        p = counts / counts.sum()
        total += 0.5 * np.abs(p - 2.0**-k).sum()
    return total / len(groups)


def toeplitz_collision_probability(s: int, k: int) -> float:
    """max over nonzero d of P_seed[H d = 0], by Gray-code walk over all d."""
    cols = _columns(s, k)
    value = np.zeros_like(cols[0])
    worst = 0.0
    seeds = value.size
    prev = 0
    for i in range(1, 1 << s):
        gray = i ^ (i >> 1)
        j = (gray ^ prev).bit_length() - 1
        value ^= cols[j]
        prev = gray
        worst = max(worst, (seeds - np.count_nonzero(value)) / seeds)
    return worst


def pairwise_independent(s: int, k: int) -> bool:
    return toeplitz_collision_probability(s, k) <= 2.0**-k + 2.0 ** (-2 * k) + 1e-15


__all__ = [
    "AmplificationProfile",
    "amplification_profile",
    "distance_bruteforce",
    "distance_by_pattern",
    "pairwise_independent",
    "toeplitz_collision_probability",
]
