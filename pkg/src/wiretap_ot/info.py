"""Entropy and mutual-information primitives (bits, 0 log 0 = 0)."""

from __future__ import annotations

import numpy as np


def entropy_bits(p: np.ndarray, axis: int = -1) -> np.ndarray:
    """Shannon entropy of probability vectors along ``axis``."""
    p = np.asarray(p, dtype=float)
    logp = np.log2(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logp).sum(axis=axis)


def entropy_of_keys(keys: np.ndarray, weights: np.ndarray) -> float:
    """Entropy of the distribution that puts ``weights`` on integer ``keys``.

    Repeated keys are merged first; ``weights`` need not be normalised.
    """
    keys = np.asarray(keys)
    weights = np.asarray(weights, dtype=float)
    total = weights.sum()
    if total <= 0:
        return 0.0
    _, inverse = np.unique(keys, return_inverse=True)
    mass = np.bincount(inverse.ravel(), weights=weights.ravel()) / total
    return float(entropy_bits(mass))


def conditional_entropy_of_keys(
    target: np.ndarray, given: np.ndarray, weights: np.ndarray, target_size: int
) -> float:
    """H(target | given) for integer-coded atoms with probabilities ``weights``."""
    target = np.asarray(target, dtype=np.int64)
    given = np.asarray(given, dtype=np.int64)
    joint = given * np.int64(target_size) + target
    return entropy_of_keys(joint, weights) - entropy_of_keys(given, weights)


def plugin_mutual_information(
    x: np.ndarray, y: np.ndarray, bias_correction: bool = True
) -> float:
    """Plug-in estimate of I(X;Y) from paired discrete samples.

    With ``bias_correction`` the Miller-Madow term
    (K_xy - K_x - K_y + 1) / (2 N ln 2) is subtracted, K counting occupied
    cells. The result may be slightly negative; callers decide on clipping.
    """
    x = np.asarray(x).ravel()
    y = np.asarray(y).ravel()
    if x.shape != y.shape:
        raise ValueError("x and y must have the same number of samples")
    n = x.size
    if n == 0:
        return 0.0
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    table = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(table, (xi, yi), 1.0)
    return _mi_from_table(table, bias_correction)


def _mi_from_table(table: np.ndarray, bias_correction: bool) -> float:
    n = table.sum()
    if n == 0:
        return 0.0
    pxy = table / n
    mi = float(
        entropy_bits(pxy.sum(axis=1)) + entropy_bits(pxy.sum(axis=0)) - entropy_bits(pxy.ravel())
    )
    if bias_correction:
        k_xy = np.count_nonzero(table)
        k_x = np.count_nonzero(table.sum(axis=1))
        k_y = np.count_nonzero(table.sum(axis=0))
        mi -= (k_xy - k_x - k_y + 1) / (2.0 * n * np.log(2.0))
    return mi


def bootstrap_mi_stderr(
    x: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    resamples: int = 200,
    bias_correction: bool = True,
) -> float:
    """Bootstrap standard error of :func:`plugin_mutual_information`.

    Resamples the contingency table multinomially, which is equivalent to
    resampling the sample pairs with replacement.
    """
    x = np.asarray(x).ravel()
    y = np.asarray(y).ravel()
    n = x.size
    if n < 2:
        return 0.0
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    table = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(table, (xi, yi), 1.0)
    probs = (table / n).ravel()
    draws = rng.multinomial(n, probs, size=resamples)
    values = [
        _mi_from_table(d.reshape(table.shape).astype(float), bias_correction) for d in draws
    ]
    return float(np.std(values, ddof=1))
