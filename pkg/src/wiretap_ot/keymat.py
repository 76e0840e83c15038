"""Secret-key distillation and key expansion.

Alice turns the bits on an index set into a secret key with a public Toeplitz
hash, then stretches the key to string length with a random binary linear
code. Both objects are public protocol parameters derived from seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import gf2
from .errors import DimensionError, LengthMismatch


@dataclass(frozen=True)
class LinearCode:
    """Binary linear code given by a ``k x n_out`` generator matrix."""

    k: int
    n_out: int
    generator: np.ndarray = field(repr=False)
    seed: int | None = None
    attempts: int = 1

    def __post_init__(self) -> None:
        g = np.asarray(self.generator, dtype=np.uint8)
        if g.shape != (self.k, self.n_out):
            raise DimensionError(f"generator shape {g.shape} != ({self.k}, {self.n_out})")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)

    @property
    def full_rank(self) -> bool:
        return gf2.rank(self.generator) == self.k


def sample_code(k: int, n_out: int, seed: int, full_rank: bool = True) -> LinearCode:
    """Draw a generator with i.i.d. uniform entries.

    With ``full_rank`` the draw is repeated until the rows are independent,
    so encoding is injective; ``attempts`` records how many draws it took.
    The result depends only on ``(k, n_out, seed)``.
    """
    if k > n_out:
        raise DimensionError(f"code dimension {k} exceeds length {n_out}")
    if k < 1:
        raise DimensionError("code dimension must be positive")
    rng = np.random.default_rng(int(seed))
    attempts = 0
    while True:
        attempts += 1
        g = rng.integers(0, 2, size=(k, n_out), dtype=np.uint8)
        if not full_rank or gf2.rank(g) == k:
            return LinearCode(k, n_out, g, int(seed), attempts)


@lru_cache(maxsize=64)
def cached_code(k: int, n_out: int, seed: int) -> LinearCode:
    return sample_code(k, n_out, seed)


def expand(code: LinearCode, s: np.ndarray) -> np.ndarray:
    """Encode key(s) ``s`` (shape ``(..., k)``) as ``s @ G`` over GF(2)."""
    s = np.asarray(s, dtype=np.uint8)
    if s.shape[-1] != code.k:
        raise LengthMismatch(f"key length {s.shape[-1]} != code dimension {code.k}")
    return gf2.matmul(s, code.generator)


def generator_to_bytes(code: LinearCode) -> bytes:
    """Row-major export; each row is padded to whole bytes, MSB first."""
    return np.packbits(code.generator, axis=1).tobytes()


def generator_from_bytes(data: bytes, k: int, n_out: int) -> np.ndarray:
    row_bytes = (n_out + 7) // 8
    packed = np.frombuffer(data, dtype=np.uint8)
    if packed.size != k * row_bytes:
        raise LengthMismatch(f"expected {k * row_bytes} bytes, got {packed.size}")
    return np.unpackbits(packed.reshape(k, row_bytes), axis=1, count=n_out)


def toeplitz_matrix(diagonals: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Toeplitz matrix with ``T[i, j] = diagonals[i - j + cols - 1]``."""
    diagonals = np.asarray(diagonals, dtype=np.uint8)
    if diagonals.shape[-1] != rows + cols - 1:
        raise LengthMismatch(f"need {rows + cols - 1} diagonal bits, got {diagonals.shape[-1]}")
    idx = np.arange(rows)[:, None] - np.arange(cols)[None, :] + cols - 1
    return diagonals[..., idx]


@dataclass(frozen=True)
class HashSpec:
    """Public Toeplitz hash from ``cols`` input bits to ``rows`` output bits."""

    rows: int
    cols: int
    seed: int
    family: str = "toeplitz"

    def __post_init__(self) -> None:
        if self.family != "toeplitz":
            raise ValueError(f"unsupported hash family {self.family!r}")
        if not 0 < self.rows <= self.cols:
            raise DimensionError(f"need 0 < rows <= cols, got {self.rows} x {self.cols}")

    @cached_property
    def diagonals(self) -> np.ndarray:
        rng = np.random.default_rng(int(self.seed))
        return rng.integers(0, 2, size=self.rows + self.cols - 1, dtype=np.uint8)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = toeplitz_matrix(self.diagonals, self.rows, self.cols)
        m.setflags(write=False)
        return m


def derive_secret_key(x_restricted: np.ndarray, out_len: int, hash: HashSpec) -> np.ndarray:
    """Hash the bits on an index set down to an ``out_len``-bit secret key.

    Batched over leading axes of ``x_restricted``.
    """
    x_restricted = np.asarray(x_restricted, dtype=np.uint8)
    if x_restricted.shape[-1] != hash.cols:
        raise LengthMismatch(f"input has {x_restricted.shape[-1]} bits, hash expects {hash.cols}")
    if out_len != hash.rows:
        raise LengthMismatch(f"requested {out_len} key bits, hash produces {hash.rows}")
    return gf2.matmul(x_restricted, hash.matrix.T)


@dataclass(frozen=True)
class KeyMaterial:
    """Alice-side keys of one protocol run."""

    T0: np.ndarray
    T1: np.ndarray
    S0: np.ndarray
    S1: np.ndarray
    Stilde0: np.ndarray
    Stilde1: np.ndarray
    Ktilde0: np.ndarray
    Ktilde1: np.ndarray


def _xor(*operands: np.ndarray) -> np.ndarray:
    shapes = {np.shape(op)[-1] for op in operands}
    if len(shapes) != 1:
        raise LengthMismatch(f"operand lengths differ: {sorted(shapes)}")
    out = np.zeros(np.broadcast_shapes(*(np.shape(op) for op in operands)), dtype=np.uint8)
    for op in operands:
        out ^= np.asarray(op, dtype=np.uint8)
    return out


def encrypt_strings(
    k0: np.ndarray, k1: np.ndarray, keymat: KeyMaterial
) -> tuple[np.ndarray, np.ndarray]:
    """``K_i xor T_i xor S~_i`` for both strings."""
    return _xor(k0, keymat.T0, keymat.Stilde0), _xor(k1, keymat.T1, keymat.Stilde1)


def decrypt_string(ktilde: np.ndarray, t: np.ndarray, stilde: np.ndarray) -> np.ndarray:
    return _xor(ktilde, t, stilde)


def build_key_material(
    t0: np.ndarray,
    t1: np.ndarray,
    s0: np.ndarray,
    s1: np.ndarray,
    code: LinearCode,
    k0: np.ndarray,
    k1: np.ndarray,
) -> KeyMaterial:
    st0, st1 = expand(code, s0), expand(code, s1)
    partial = KeyMaterial(t0, t1, s0, s1, st0, st1, t0, t1)
    kt0, kt1 = encrypt_strings(k0, k1, partial)
    return KeyMaterial(t0, t1, s0, s1, st0, st1, kt0, kt1)
