"""Broadcast erasure channel from Alice to Bob and Eve.

Bit strings are ``uint8`` arrays of 0/1. Received strings are ``int8`` arrays
over {0, 1, ERASED}; the erasure marker is a third symbol (-1), never a bit
value, so XOR paths cannot silently absorb it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch

ERASED = -1


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ChannelParams:
    """Erasure probabilities of Bob's (eps1) and Eve's (eps2) channels."""

    eps1: float
    eps2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eps1", _check_probability("eps1", self.eps1))
        object.__setattr__(self, "eps2", _check_probability("eps2", self.eps2))


def as_bits(x, length: int | None = None) -> np.ndarray:
    """Coerce a sequence or '0101' string to a validated bit array."""
    if isinstance(x, str):
        x = [int(ch) for ch in x]
    arr = np.asarray(x, dtype=np.int64)
    if arr.ndim != 1 or np.any((arr != 0) & (arr != 1)):
        raise ValueError("bit strings must be 1-D sequences over {0, 1}")
    if length is not None and arr.size != length:
        raise ValueError(f"expected {length} bits, got {arr.size}")
    return arr.astype(np.uint8)


def transmit_broadcast(
    x: np.ndarray, params: ChannelParams, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Send ``x`` through two independent binary erasure channels.

    Consumes exactly ``2 * len(x)`` uniform doubles from ``rng``: the first
    ``len(x)`` decide Bob's erasures, the next ``len(x)`` Eve's. A position is
    erased when its draw falls below the channel's erasure probability.

    Returns
    -------
    y, z : np.ndarray
        Bob's and Eve's received strings (``int8``, erasures marked ERASED).
    """
    x = np.asarray(x, dtype=np.uint8)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x must be a nonempty 1-D bit string")
    draws = rng.random((2, x.size))
    y = x.astype(np.int8)
    z = x.astype(np.int8)
    y[draws[0] < params.eps1] = ERASED
    z[draws[1] < params.eps2] = ERASED
    return y, z


def erasure_partition(recv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split positions into (erased, unerased) index arrays, both ascending."""
    recv = np.asarray(recv)
    mask = recv == ERASED
    return np.flatnonzero(mask), np.flatnonzero(~mask)


@dataclass(frozen=True)
class DiscreteBroadcastChannel:
    """Finite broadcast channel p(y, z | x).

    ``pmf[x, j]`` is the probability of output pair ``output_pairs[j]``.
    """

    input_size: int
    output_pairs: tuple[tuple, ...]
    pmf: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        pmf = np.asarray(self.pmf, dtype=float)
        pairs = tuple(tuple(p) for p in self.output_pairs)
        if pmf.shape != (self.input_size, len(pairs)):
            raise DimensionMismatch(
                f"pmf shape {pmf.shape} does not match ({self.input_size}, {len(pairs)})"
            )
        if np.any(pmf < 0) or np.any(np.abs(pmf.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("every row of pmf must be a probability vector")
        if len(set(pairs)) != len(pairs):
            raise ValueError("output pairs must be distinct")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "output_pairs", pairs)

    @cached_property
    def label_indicators(self) -> tuple[np.ndarray, np.ndarray]:
        """0/1 matrices mapping output pairs to their y and z components."""
        y_of, z_of, ny, nz = self.labels()
        return np.eye(ny)[y_of], np.eye(nz)[z_of]

    def labels(self) -> tuple[np.ndarray, np.ndarray, int, int]:
        """Integer codes of the y and z component of every output pair."""
        ys = sorted({p[0] for p in self.output_pairs}, key=repr)
        zs = sorted({p[1] for p in self.output_pairs}, key=repr)
        y_index = {v: i for i, v in enumerate(ys)}
        z_index = {v: i for i, v in enumerate(zs)}
        y_of = np.array([y_index[p[0]] for p in self.output_pairs])
        z_of = np.array([z_index[p[1]] for p in self.output_pairs])
        return y_of, z_of, len(ys), len(zs)

    def to_dict(self) -> dict:
        return {
            "input_size": self.input_size,
            "output_pairs": [list(p) for p in self.output_pairs],
            "pmf": self.pmf.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteBroadcastChannel":
        return cls(
            input_size=int(data["input_size"]),
            output_pairs=tuple(tuple(p) for p in data["output_pairs"]),
            pmf=np.asarray(data["pmf"], dtype=float),
        )


def bec_pair_as_broadcast(params: ChannelParams) -> DiscreteBroadcastChannel:
    """The two-BEC channel written as a general p(y, z | x).

    Outputs are the seven pairs consistent with some binary input, with
    ERASED standing for the erasure symbol.
    """
    e1, e2 = params.eps1, params.eps2
    pairs = [(0, 0), (0, ERASED), (1, 1), (1, ERASED), (ERASED, 0), (ERASED, 1), (ERASED, ERASED)]
    pmf = np.zeros((2, len(pairs)))
    for x in (0, 1):
        for j, (y, z) in enumerate(pairs):
            py = (1 - e1) if y == x else (e1 if y == ERASED else 0.0)
            pz = (1 - e2) if z == x else (e2 if z == ERASED else 0.0)
            pmf[x, j] = py * pz
    return DiscreteBroadcastChannel(2, tuple(pairs), pmf)
