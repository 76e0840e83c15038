"""Exact binomial tails for the set-provisioning events.

Bob can build his index sets when his erasure count is neither too small
nor too large, and Eve must see roughly an eps2 fraction erased. Both events
are binomial tails; they are summed exactly in log space here instead of
being bounded.
"""

from __future__ import annotations

import math

import numpy as np

from ..protocol import ProtocolParams


def _log_binom_pmf(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    # log C(n, k) by cumulative sums of log((n - k + 1) / k)
    steps = np.log(n - k[1:] + 1.0) - np.log(k[1:])
    log_comb = np.concatenate([[0.0], np.cumsum(steps)])
    return log_comb + k * math.log(p) + (n - k) * math.log1p(-p)


def _logsumexp(a: np.ndarray) -> float:
    if a.size == 0:
        return -math.inf
    top = float(a.max())
    return top + math.log(float(np.exp(a - top).sum()))


def provisioning_probability(n: int, eps: float, threshold: int | float) -> float:
    """P[Bin(n, eps) >= threshold].

    A non-integer threshold is rounded up. The shorter of the two tails is
    summed in log space, so values near 1 keep their absolute accuracy.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must lie in [0, 1]")
    t = math.ceil(threshold)
    if t <= 0:
        return 1.0
    if t > n:
        return 0.0
    if eps == 0.0:
        return 0.0
    if eps == 1.0:
        return 1.0
    logpmf = _log_binom_pmf(n, eps)
    if t > n * eps:
        return min(1.0, math.exp(_logsumexp(logpmf[t:])))
    return max(0.0, 1.0 - math.exp(_logsumexp(logpmf[:t])))


def eve_erasure_provisioning(n: int, eps2: float, delta: float) -> float:
    """P[Eve sees at least an eps2 (1 - delta) fraction of positions erased]."""
    return provisioning_probability(n, eps2, n * eps2 * (1 - delta) - 1e-9)


def bob_provisioning(p: ProtocolParams) -> float:
    """Exact P[J = 1]: probability that Bob can build all four index sets."""
    e1 = p.eps.eps1
    ok = np.array([p.provisioned(e) for e in range(p.n + 1)])
    if e1 in (0.0, 1.0):
        return float(ok[0 if e1 == 0.0 else p.n])
    logpmf = _log_binom_pmf(p.n, e1)
    return float(np.exp(logpmf[ok]).sum()) if ok.any() else 0.0
