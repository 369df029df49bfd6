"""Subspaces of F_p^n in canonical RREF form, duals, containment and cosets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import errors
from .fpcore import (
    as_matrix,
    check_prime,
    coords_table,
    decode_point,
    encode_point,
    null_space,
    place_values,
    rref,
    span_points,
)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Exact number of k-dimensional subspaces of F_p^n."""
    if not 0 <= k <= n:
        raise errors.InvalidInputError(f"need 0 <= k <= n, got k={k}, n={n}")
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (k - i) - 1
    return num // den


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by its (unique) RREF basis.

    Equality and hashing compare ``(p, n, basis)`` entry-wise, which is exact
    equality of subspaces because the RREF basis is canonical.
    """

    p: int
    n: int
    basis: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @classmethod
    def from_rows(cls, rows, p: int, n: int) -> "Subspace":
        """Span of arbitrary row vectors."""
        p = check_prime(p)
        mat = as_matrix(rows, p, cols=n)
        if mat.shape[0] and mat.shape[1] != n:
            raise errors.InvalidInputError(f"rows must have {n} entries")
        red, r, piv = rref(mat.reshape(-1, n), p)
        return cls._trusted(red[:r], tuple(piv), p, n)

    @classmethod
    def _trusted(cls, red: np.ndarray, pivots: tuple[int, ...], p: int, n: int) -> "Subspace":
        return cls(p, n, tuple(tuple(int(v) for v in row) for row in red), pivots)

    @classmethod
    def zero(cls, p: int, n: int) -> "Subspace":
        return cls(check_prime(p), n, (), ())

    @classmethod
    def full(cls, p: int, n: int) -> "Subspace":
        eye = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls(check_prime(p), n, eye, tuple(range(n)))

    @property
    def k(self) -> int:
        return len(self.basis)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.array(self.basis, dtype=np.int64).reshape(self.k, self.n)
        m.flags.writeable = False
        return m

    @cached_property
    def free_columns(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if j not in self.pivots)

    def points(self) -> np.ndarray:
        """Sorted indices of the p^k points of the subspace."""
        return span_points(self.matrix, self.p, self.n)

    def contains_point(self, x) -> bool:
        x = np.asarray(x, dtype=np.int64) % self.p
        return not reduce_coords(self, x[None, :]).any()

    def image(self, t: np.ndarray) -> "Subspace":
        """Image under the linear map x -> t @ x."""
        return Subspace.from_rows(self.matrix @ np.asarray(t, dtype=np.int64).T, self.p, self.n)

    def __str__(self) -> str:
        return format_subspace(self)


def format_subspace(v: Subspace) -> str:
    return ";".join(",".join(str(e) for e in row) for row in v.basis)


def parse_subspace(text: str, p: int, n: int) -> Subspace:
    text = text.strip()
    if text in ("", "0", "{0}"):
        return Subspace.zero(p, n)
    try:
        rows = [[int(e) for e in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise errors.InvalidInputError(f"bad subspace notation {text!r}") from exc
    if any(len(r) != n for r in rows):
        raise errors.InvalidInputError(f"every row of {text!r} needs {n} entries")
    return Subspace.from_rows(rows, p, n)


def pivot_blocks(n: int, k: int) -> list[tuple[int, ...]]:
    """Pivot-column sets in lexicographic order; one enumeration block each."""
    return list(itertools.combinations(range(n), k))


def enumerate_block(p: int, n: int, pivots: Sequence[int]) -> Iterator[Subspace]:
    """All subspaces whose RREF basis has exactly these pivot columns.

    Free entries run in base-p counting order with the last free slot
    (row-major) varying fastest.
    """
    pivots = tuple(pivots)
    k = len(pivots)
    pivset = set(pivots)
    slots = [(i, j) for i in range(k) for j in range(pivots[i] + 1, n) if j not in pivset]
    template = [[0] * n for _ in range(k)]
    for i, c in enumerate(pivots):
        template[i][c] = 1
    for values in itertools.product(range(p), repeat=len(slots)):
        rows = [r[:] for r in template]
        for (i, j), v in zip(slots, values):
            rows[i][j] = v
        yield Subspace(p, n, tuple(tuple(r) for r in rows), pivots)


def enumerate_subspaces(p: int, n: int, k: int, override: bool = False) -> Iterator[Subspace]:
    """Every element of G(k, F_p^n) exactly once, in deterministic order."""
    p = check_prime(p)
    if not 0 <= k <= n:
        raise errors.InvalidInputError(f"need 0 <= k <= n, got k={k}, n={n}")
    errors.check_points(p, n, override)
    errors.check_directions(gaussian_binomial(n, k, p), override)
    for piv in pivot_blocks(n, k):
        yield from enumerate_block(p, n, piv)


def dual(v: Subspace) -> Subspace:
    """Annihilator of ``v`` under the dot-product pairing."""
    ker = null_space(v.matrix.reshape(v.k, v.n), v.p)
    piv = tuple(int(np.flatnonzero(row)[0]) for row in ker)
    return Subspace._trusted(ker, piv, v.p, v.n)


def _same_ambient(a: Subspace, b: Subspace) -> None:
    if (a.p, a.n) != (b.p, b.n):
        raise errors.InvalidInputError(
            f"ambient mismatch: F_{a.p}^{a.n} vs F_{b.p}^{b.n}"
        )


def reduce_coords(v: Subspace, coords: np.ndarray) -> np.ndarray:
    """Zero the pivot coordinates of each row by subtracting basis multiples.

    The result is the canonical representative of each row's coset x + v.
    """
    coords = np.asarray(coords, dtype=np.int64)
    if v.k == 0:
        return coords % v.p
    return (coords - coords[:, list(v.pivots)] @ v.matrix) % v.p


def contains(w: Subspace, v: Subspace) -> bool:
    """True iff v is a subspace of w."""
    _same_ambient(w, v)
    if v.k > w.k:
        return False
    if v.k == 0:
        return True
    return not reduce_coords(w, v.matrix).any()


@dataclass(frozen=True)
class AffinePlane:
    """The coset rep + direction; ``rep`` vanishes on the direction's pivots."""

    direction: Subspace
    rep: int

    @property
    def rep_coords(self) -> tuple[int, ...]:
        return decode_point(self.rep, self.direction.p, self.direction.n)

    def points(self) -> np.ndarray:
        d = self.direction
        base = np.asarray(self.rep_coords, dtype=np.int64)
        span = coords_table(d.p, d.n)[d.points()]
        return np.sort((span + base) % d.p @ place_values(d.p, d.n))


def coset_of(v: Subspace, x) -> AffinePlane:
    """pi_V(x): the coset of v through x (given as index or coordinates)."""
    if isinstance(x, (int, np.integer)):
        coords = decode_point(int(x), v.p, v.n)
    else:
        coords = tuple(int(c) for c in x)
        encode_point(coords, v.p, v.n)
    rep = reduce_coords(v, np.array([coords], dtype=np.int64))[0]
    return AffinePlane(v, int(rep @ place_values(v.p, v.n)))


def coset_codes(v: Subspace, coords: np.ndarray) -> np.ndarray:
    """Compact coset labels in [0, p^(n-k)) for each row of ``coords``.

    Two rows get the same label iff they lie in the same coset of v; the label
    is the base-p number formed by the representative's free coordinates.
    """
    reps = reduce_coords(v, coords)
    free = list(v.free_columns)
    if not free:
        return np.zeros(reps.shape[0], dtype=np.int64)
    return reps[:, free] @ place_values(v.p, len(free))
