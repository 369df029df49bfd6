"""Arithmetic in F_p, point indexing and matrix algebra over F_p.

Points of F_p^n are addressed by integers in [0, p^n): base-p digits, least
significant first, so digit i is coordinate x_{i+1}. Matrices are plain
``numpy`` int64 arrays with entries kept in [0, p).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

MAX_PRIME = 1 << 20
_MR_BASES = (2, 3, 5, 7)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin; the base set is exact far beyond ``MAX_PRIME``."""
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, r = p - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for b in _MR_BASES:
        x = pow(b, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Validate a field modulus and return it as a plain int."""
    if isinstance(p, bool) or int(p) != p:
        raise InvalidInputError(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p > MAX_PRIME:
        raise InvalidInputError(f"modulus {p} exceeds the supported cap 2^20")
    if not is_prime(p):
        raise InvalidInputError(f"modulus {p} is not prime")
    return p


class PrimeModulus(int):
    """An ``int`` that is known to be a supported prime."""

    def __new__(cls, p: int) -> "PrimeModulus":
        return super().__new__(cls, check_prime(p))


def fp_inv(a: int, p: int) -> int:
    p = check_prime(p)
    a %= p
    if a == 0:
        raise InvalidInputError("non-invertible element")
    return pow(a, p - 2, p)


def encode_point(coords: Sequence[int], p: int, n: int) -> int:
    if len(coords) != n:
        raise InvalidInputError(f"expected {n} coordinates, got {len(coords)}")
    idx = 0
    for c in reversed(coords):
        c = int(c)
        if not 0 <= c < p:
            raise InvalidInputError(f"coordinate {c} outside [0, {p})")
        idx = idx * p + c
    return idx


def decode_point(idx: int, p: int, n: int) -> tuple[int, ...]:
    idx = int(idx)
    if not 0 <= idx < p**n:
        raise InvalidInputError(f"point index {idx} outside [0, {p}^{n})")
    out = []
    for _ in range(n):
        idx, digit = divmod(idx, p)
        out.append(digit)
    return tuple(out)


def place_values(p: int, n: int) -> np.ndarray:
    return p ** np.arange(n, dtype=np.int64)


@lru_cache(maxsize=8)
def coords_table(p: int, n: int) -> np.ndarray:
    """Row ``idx`` holds the coordinates of point ``idx`` (read-only)."""
    idx = np.arange(p**n, dtype=np.int64)
    table = np.empty((p**n, n), dtype=np.int64)
    for i in range(n):
        idx, table[:, i] = np.divmod(idx, p)
    table.flags.writeable = False
    return table


def encode_rows(rows: np.ndarray, p: int) -> np.ndarray:
    """Vectorised ``encode_point`` for an (m, n) array of residues."""
    rows = np.asarray(rows, dtype=np.int64)
    return rows @ place_values(p, rows.shape[1])


def as_matrix(m, p: int, cols: int | None = None) -> np.ndarray:
    arr = np.array(m, dtype=np.int64)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0 if cols is None else cols)
    if arr.ndim != 2:
        raise InvalidInputError("matrix must be two-dimensional")
    return arr % p


def rref(m, p: int) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form over F_p.

    Returns the reduced matrix (same shape, zero rows at the bottom), its rank
    and the pivot columns in increasing order.
    """
    p = check_prime(p)
    a = as_matrix(m, p).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * fp_inv(int(a[r, c]), p) % p
        factors = a[:, c].copy()
        factors[r] = 0
        hit = np.flatnonzero(factors)
        if hit.size:
            a[hit] = (a[hit] - np.outer(factors[hit], a[r])) % p
        pivots.append(c)
        r += 1
    return a, r, pivots


def rank(m, p: int) -> int:
    return rref(m, p)[1]


def null_space(m, p: int) -> np.ndarray:
    """RREF basis (as rows) of the right kernel {v : m v = 0}."""
    red, r, pivots = rref(m, p)
    cols = red.shape[1]
    free = [j for j in range(cols) if j not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, j in enumerate(free):
        basis[t, j] = 1
        for i, c in enumerate(pivots):
            basis[t, c] = -red[i, j] % p
    if basis.shape[0] == 0:
        return basis
    return rref(basis, p)[0]


def span_points(basis, p: int, n: int) -> np.ndarray:
    """Sorted point indices of the row space of ``basis``."""
    basis = as_matrix(basis, p, cols=n)
    k = basis.shape[0]
    if k == 0:
        return np.zeros(1, dtype=np.int64)
    coeffs = coords_table(p, k)
    return np.sort(encode_rows(coeffs @ basis % p, p))
