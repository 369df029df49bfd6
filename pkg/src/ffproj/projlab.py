"""Projection images, exceptional sets, the overlap number and hyperplane slicing."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import errors
from .fpcore import check_prime, coords_table, decode_point, encode_point, encode_rows
from .grassmann import (
    AffinePlane,
    Subspace,
    contains,
    coset_codes,
    coset_of,
    dual,
    enumerate_block,
    enumerate_subspaces,
    format_subspace,
    gaussian_binomial,
    pivot_blocks,
    reduce_coords,
)


class PointSet:
    """A subset of F_p^n stored as a membership mask over point indices."""

    __slots__ = ("p", "n", "members", "_card")

    def __init__(self, p: int, n: int, members: np.ndarray):
        self.p = check_prime(p)
        self.n = n
        members = np.asarray(members, dtype=bool)
        if members.shape != (p**n,):
            raise errors.InvalidInputError(f"membership mask must have length {p}^{n}")
        members.flags.writeable = False
        self.members = members
        self._card = int(np.count_nonzero(members))

    @classmethod
    def from_indices(cls, p: int, n: int, indices: Iterable[int], override: bool = False) -> "PointSet":
        errors.check_points(p, n, override)
        mask = np.zeros(p**n, dtype=bool)
        idx = np.fromiter((int(i) for i in indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= p**n):
            raise errors.InvalidInputError("point index out of range")
        mask[idx] = True
        return cls(p, n, mask)

    @classmethod
    def from_points(cls, p: int, n: int, points: Iterable[Sequence[int]], override: bool = False) -> "PointSet":
        return cls.from_indices(p, n, (encode_point(pt, p, n) for pt in points), override)

    @classmethod
    def full(cls, p: int, n: int, override: bool = False) -> "PointSet":
        errors.check_points(p, n, override)
        return cls(p, n, np.ones(p**n, dtype=bool))

    @classmethod
    def empty(cls, p: int, n: int, override: bool = False) -> "PointSet":
        errors.check_points(p, n, override)
        return cls(p, n, np.zeros(p**n, dtype=bool))

    @property
    def cardinality(self) -> int:
        return self._card

    def __len__(self) -> int:
        return self._card

    @property
    def a(self) -> float:
        """log_p #A (``-inf`` for the empty set)."""
        return math.log(self._card) / math.log(self.p) if self._card else -math.inf

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.members)

    def coords(self) -> np.ndarray:
        return coords_table(self.p, self.n)[self.indices()]

    def points(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in row) for row in self.coords()]

    def __contains__(self, x) -> bool:
        if not isinstance(x, (int, np.integer)):
            x = encode_point(x, self.p, self.n)
        return bool(self.members[int(x)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.p, self.n) == (other.p, other.n) and np.array_equal(self.members, other.members)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PointSet(p={self.p}, n={self.n}, #A={self._card})"

    def issubset(self, other: "PointSet") -> bool:
        _check_ambient(self, other.p, other.n)
        return not np.any(self.members & ~other.members)

    def restrict(self, mask: np.ndarray) -> "PointSet":
        return PointSet(self.p, self.n, self.members & mask)

    def affine_image(self, t: np.ndarray, b: Sequence[int] = ()) -> "PointSet":
        """{t @ x + b : x in A} for an invertible t."""
        t = np.asarray(t, dtype=np.int64) % self.p
        shift = np.asarray(b if len(b) else [0] * self.n, dtype=np.int64)
        img = (self.coords() @ t.T + shift) % self.p
        out = PointSet.from_indices(self.p, self.n, encode_rows(img, self.p), override=True)
        if out.cardinality != self.cardinality:
            raise errors.InvalidInputError("affine map is not invertible")
        return out

    def to_text(self) -> str:
        lines = [f"{self.p} {self.n}"]
        lines += [",".join(str(c) for c in pt) for pt in self.points()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, override: bool = False) -> "PointSet":
        rows = []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if line:
                rows.append(line)
        if not rows:
            raise errors.InvalidInputError("point file is missing its 'p n' header")
        head = rows[0].split()
        if len(head) != 2:
            raise errors.InvalidInputError(f"bad header {rows[0]!r}; expected 'p n'")
        try:
            p, n = int(head[0]), int(head[1])
            pts = [tuple(int(c) for c in r.split(",")) for r in rows[1:]]
        except ValueError as exc:
            raise errors.InvalidInputError(f"unparseable point file: {exc}") from exc
        return cls.from_points(p, n, pts, override)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path, override: bool = False) -> "PointSet":
        return cls.from_text(Path(path).read_text(), override)


def _check_ambient(a: PointSet, p: int, n: int) -> None:
    if (a.p, a.n) != (p, n):
        raise errors.InvalidInputError(f"ambient mismatch: set in F_{a.p}^{a.n}, subspace in F_{p}^{n}")


def exceeds_threshold(count: int, p: int, s: float) -> bool:
    """Definition of exceptional: count < p^s, strict, p^s in double precision."""
    return count < p**s


def _count_codes(codes: np.ndarray, size: int) -> int:
    if codes.size == 0:
        return 0
    if codes.size * 8 < size:
        return int(np.unique(codes).size)
    return int(np.count_nonzero(np.bincount(codes, minlength=size)))


def projection_count(v: Subspace, a: PointSet) -> int:
    """#pi_V(A) without materialising the cosets."""
    _check_ambient(a, v.p, v.n)
    return _count_codes(coset_codes(v, a.coords()), v.p ** (v.n - v.k))


def project(v: Subspace, a: PointSet) -> frozenset[AffinePlane]:
    """pi_V(A) as a set of canonical affine planes."""
    _check_ambient(a, v.p, v.n)
    reps = np.unique(encode_rows(reduce_coords(v, a.coords()), v.p))
    return frozenset(AffinePlane(v, int(r)) for r in reps)


def overlap_number(family: Sequence[Subspace]) -> tuple[int, int | None]:
    """Max over nonzero xi of #{V in family : xi in dual(V)}, with its argmin-index xi."""
    if not family:
        return 0, None
    p, n = family[0].p, family[0].n
    hits = np.zeros(p**n, dtype=np.int64)
    for v in family:
        if (v.p, v.n) != (p, n):
            raise errors.InvalidInputError("overlap_number needs a common ambient space")
        hits[dual(v).points()] += 1
    hits[0] = 0
    xi0 = int(np.argmax(hits))
    m = int(hits[xi0])
    return (m, xi0) if m else (0, None)


@dataclass
class ExceptionalReport:
    p: int
    n: int
    k: int
    s: float
    cardinality: int
    directions: list[tuple[Subspace, int]]
    exceptional: list[Subspace]
    M: int
    xi0: int | None
    theta: list[Subspace]

    @property
    def a(self) -> float:
        return math.log(self.cardinality) / math.log(self.p) if self.cardinality else -math.inf

    @property
    def threshold(self) -> float:
        return self.p**self.s

    @property
    def in_range(self) -> bool:
        """Whether 0 < s < min{k, a}, the range of the main estimate."""
        return 0 < self.s < min(self.k, self.a)

    def counts(self) -> list[int]:
        return [c for _, c in self.directions]

    def to_dict(self) -> dict:
        exc = set(self.exceptional)
        return {
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "s": self.s,
            "cardinality": self.cardinality,
            "a": self.a if self.cardinality else None,
            "threshold": self.threshold,
            "in_range": self.in_range,
            "direction_dim": self.n - self.k,
            "directions": [
                {"subspace": format_subspace(v), "count": c, "exceptional": v in exc}
                for v, c in self.directions
            ],
            "exceptional_count": len(self.exceptional),
            "M": self.M,
            "xi0": None if self.xi0 is None else list(decode_point(self.xi0, self.p, self.n)),
            "theta": [format_subspace(v) for v in self.theta],
        }


def _scan_block(a: PointSet, p: int, n: int, pivots: tuple[int, ...]) -> list[tuple[Subspace, int]]:
    coords = a.coords()
    size = p ** (n - len(pivots))
    return [(v, _count_codes(coset_codes(v, coords), size)) for v in enumerate_block(p, n, pivots)]


def exceptional_set(
    a: PointSet, k: int, s: float, override: bool = False, workers: int = 1
) -> ExceptionalReport:
    """E_s(A) over every direction V in G(n-k, F_p^n), with M, xi0 and Theta.

    With ``workers > 1`` the pivot blocks of the subspace stream are scanned
    concurrently; results are merged in block order so the report does not
    depend on the worker count.
    """
    p, n = a.p, a.n
    if not 0 < k < n:
        raise errors.InvalidInputError(f"need 0 < k < n, got k={k}, n={n}")
    if not s > 0:
        raise errors.InvalidInputError(f"need s > 0, got s={s}")
    errors.check_points(p, n, override)
    errors.check_directions(gaussian_binomial(n, n - k, p), override)
    blocks = pivot_blocks(n, n - k)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _scan_block(a, p, n, b), blocks))
    else:
        parts = [_scan_block(a, p, n, b) for b in blocks]
    directions = [item for part in parts for item in part]
    exceptional = [v for v, c in directions if exceeds_threshold(c, p, s)]
    m, xi0 = overlap_number(exceptional)
    theta = [] if xi0 is None else [v for v in exceptional if dual(v).contains_point(decode_point(xi0, p, n))]
    return ExceptionalReport(p, n, k, float(s), a.cardinality, directions, exceptional, m, xi0, theta)


def falconer_rhs(a: PointSet, k: int, s: float, m: int) -> float:
    """M * p^(n-k+s-a), the right side of the Falconer-type overlap estimate."""
    if a.cardinality < 1:
        raise errors.InvalidInputError("falconer_rhs needs a nonempty set")
    return m * a.p ** (a.n - k + s - a.a)


def falconer_ratio(report: ExceptionalReport, a: PointSet) -> float:
    if not report.exceptional:
        return 0.0
    return len(report.exceptional) / falconer_rhs(a, report.k, report.s, report.M)


def hyperplane_functional(h0: Subspace) -> np.ndarray:
    """The normalised xi with h0 = {x : x . xi = 0} (leading entry 1)."""
    if h0.k != h0.n - 1:
        raise errors.InvalidInputError(f"expected a hyperplane, got dimension {h0.k} in F_p^{h0.n}")
    return dual(h0).matrix[0].copy()


@dataclass
class SliceDecomposition:
    """A split into the p translates H_i = {x : x . xi = i} of a hyperplane H0."""

    h0: Subspace
    xi: np.ndarray
    slices: list[np.ndarray]
    classes: dict[int, list[int]] = field(default_factory=dict)
    best: tuple[int, list[int]] | None = None

    @property
    def sizes(self) -> list[int]:
        return [int(s.size) for s in self.slices]

    def slice_set(self, i: int) -> PointSet:
        return PointSet.from_indices(self.h0.p, self.h0.n, self.slices[i], override=True)

    def plane(self, i: int) -> AffinePlane:
        """The affine hyperplane carrying slice i."""
        lead = int(np.flatnonzero(self.xi)[0])
        x = [0] * self.h0.n
        x[lead] = i
        return coset_of(self.h0, x)


def dyadic_classes(sizes: Sequence[int]) -> tuple[dict[int, list[int]], tuple[int, list[int]] | None]:
    """Group nonempty slices by floor(log2 size); pick the class maximising #I * 2^beta.

    Ties go to the smaller beta.
    """
    classes: dict[int, list[int]] = {}
    for i, size in enumerate(sizes):
        if size > 0:
            classes.setdefault(int(size).bit_length() - 1, []).append(i)
    if not classes:
        return classes, None
    beta = max(sorted(classes), key=lambda b: len(classes[b]) << b)
    return classes, (beta, classes[beta])


def slice_set(a: PointSet, h0: Subspace) -> SliceDecomposition:
    _check_ambient(a, h0.p, h0.n)
    xi = hyperplane_functional(h0)
    idx = a.indices()
    labels = coords_table(a.p, a.n)[idx] @ xi % a.p
    slices = [idx[labels == i] for i in range(a.p)]
    classes, best = dyadic_classes([s.size for s in slices])
    return SliceDecomposition(h0, xi, slices, classes, best)


def fubini_check(a: PointSet, v: Subspace, h0: Subspace) -> bool:
    """#pi_V(A) == sum_i #pi_V(A cap H_i) for V inside H0."""
    if not contains(h0, v):
        raise errors.InvalidInputError("fubini_check needs V contained in H0")
    dec = slice_set(a, h0)
    total = sum(projection_count(v, dec.slice_set(i)) for i in range(a.p))
    return projection_count(v, a) == total


def case1_certificate(a: PointSet, k: int, s: float) -> tuple[AffinePlane, Subspace] | None:
    """First affine hyperplane H with #(A cap H) >= p^(s+n-k-1), or None.

    Hyperplane directions are scanned in enumeration order and translates by
    slice index.
    """
    p, n = a.p, a.n
    if not 0 < k < n:
        raise errors.InvalidInputError(f"need 0 < k < n, got k={k}, n={n}")
    need = p ** (s + n - k - 1)
    for h0 in enumerate_subspaces(p, n, n - 1):
        dec = slice_set(a, h0)
        for i, size in enumerate(dec.sizes):
            if size >= need:
                return dec.plane(i), h0
    return None


def max_hyperplane_load(a: PointSet) -> int:
    """max over affine hyperplanes H of #(A cap H)."""
    return max(max(slice_set(a, h0).sizes) for h0 in enumerate_subspaces(a.p, a.n, a.n - 1))
