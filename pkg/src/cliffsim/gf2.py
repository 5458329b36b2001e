"""Dense linear algebra over GF(2) on numpy uint8 arrays."""

from __future__ import annotations

import numpy as np


def as_bits(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def row_reduce(m: np.ndarray):
    """Reduced row echelon form with lowest-index pivoting.

    Returns (rref, pivot_columns).
    """
    r = as_bits(m).copy()
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        hits = np.nonzero(r[row:, col])[0]
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            r[[row, p]] = r[[p, row]]
        mask = r[:, col].astype(bool)
        mask[row] = False
        r[mask] ^= r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(m: np.ndarray) -> int:
    m = as_bits(m)
    if m.size == 0:
        return 0
    return len(row_reduce(m)[1])


def prefix_row_ranks(m: np.ndarray) -> list[int]:
    """rank of the first i rows, for i = 1..rows (incremental elimination)."""
    m = as_bits(m)
    basis: dict[int, np.ndarray] = {}
    out = []
    for row in m:
        v = row.copy()
        while True:
            nz = np.flatnonzero(v)
            if nz.size == 0:
                break
            col = int(nz[0])
            if col in basis:
                v ^= basis[col]
            else:
                basis[col] = v
                break
        out.append(len(basis))
    return out


def solve_left(m: np.ndarray, b: np.ndarray):
    """Some x with x @ m = b over GF(2), or None when b is outside the row space."""
    m = as_bits(m)
    b = as_bits(b)
    rows, cols = m.shape
    aug = np.concatenate([m, np.eye(rows, dtype=np.uint8)], axis=1)
    target = np.concatenate([b, np.zeros(rows, dtype=np.uint8)])
    red, piv = row_reduce(aug)
    for i, col in enumerate(piv):
        if col >= cols:
            break
        if target[col]:
            target ^= red[i]
    if target[:cols].any():
        return None
    return target[cols:].copy()


def solve(m: np.ndarray, b: np.ndarray):
    """Some x with m @ x = b, or None."""
    return solve_left(as_bits(m).T, b)


def inverse(m: np.ndarray) -> np.ndarray:
    m = as_bits(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("square matrix required")
    red, piv = row_reduce(np.concatenate([m, np.eye(n, dtype=np.uint8)], axis=1))
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix over GF(2)")
    return red[:, n:].copy()


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64) & 1).astype(np.uint8)


def in_rowspace(m: np.ndarray, v: np.ndarray) -> bool:
    return solve_left(m, v) is not None


def nullspace(m: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {x : m @ x = 0}."""
    m = as_bits(m)
    rows, cols = m.shape
    red, piv = row_reduce(m)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for i, c in enumerate(piv):
            v[c] = red[i, f]
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.uint8)
    return np.array(basis, dtype=np.uint8)


def random_invertible(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of GL(n, 2) by rejection."""
    while True:
        m = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if rank(m) == n:
            return m


def random_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    u = np.triu(rng.integers(0, 2, size=(n, n), dtype=np.uint8))
    return (u | u.T).astype(np.uint8)


def pack_rows(m: np.ndarray) -> list[int]:
    """Each row as an int, column j at bit j."""
    m = as_bits(m)
    weights = [1 << j for j in range(m.shape[1])]
    return [sum(w for w, bit in zip(weights, row) if bit) for row in m.tolist()]


def unpack_rows(rows: list[int], width: int) -> np.ndarray:
    out = np.zeros((len(rows), width), dtype=np.uint8)
    for i, v in enumerate(rows):
        for j in range(width):
            out[i, j] = (v >> j) & 1
    return out
