"""Small GF(2) linear algebra helpers.

Matrices are ``uint8`` arrays of 0/1 entries. Rank computations pack each row
into a Python int and reduce against an xor basis keyed by leading bit, which
is fast enough for the few-hundred-column matrices the protocol produces.
"""

from __future__ import annotations

import numpy as np


def rows_to_ints(matrix: np.ndarray) -> list[int]:
    """Pack each row of a 0/1 matrix into an int (column 0 is the MSB)."""
    matrix = np.asarray(matrix, dtype=np.uint8)
    if matrix.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if matrix.shape[1] == 0:
        return [0] * matrix.shape[0]
    packed = np.packbits(matrix, axis=1)
    pad = packed.shape[1] * 8 - matrix.shape[1]
    return [int.from_bytes(row.tobytes(), "big") >> pad for row in packed]


def rank(matrix: np.ndarray) -> int:
    """Rank over GF(2)."""
    matrix = np.asarray(matrix, dtype=np.uint8)
    if matrix.size == 0:
        return 0
    return rank_of_ints(rows_to_ints(matrix), min(matrix.shape))


def rank_of_ints(rows: list[int], cap: int | None = None) -> int:
    """Rank of packed rows; stops early once ``cap`` pivots are found."""
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            pivot = basis.get(lead)
            if pivot is None:
                basis[lead] = row
                break
            row ^= pivot
        if cap is not None and len(basis) >= cap:
            break
    return len(basis)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product mod 2; batched over leading axes of ``a``.

    Float32 BLAS is exact here while inner dimensions stay below 2**24.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if b.shape[0] >= 1 << 24:
        prod = a.astype(np.int64) @ b.astype(np.int64)
    else:
        prod = a.astype(np.float32) @ b.astype(np.float32)
    return (prod.astype(np.int64) & 1).astype(np.uint8)
