"""Structured and random point sets: the Szemeredi-Trotter product set,
cylinders over a base construction, planar slabs and seeded random sets.

Randomness comes from SplitMix64 so that a (p, n, a, seed) tuple names the
same set in any language:

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z <- state
    z <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2^64)
    z <- (z xor (z >> 27)) * 0x94D049BB133111EB    (mod 2^64)
    output z xor (z >> 31)

Bounded draws use rejection (no modulo bias); a random m-subset is the first
m slots of a Fisher-Yates pass over the candidate indices in increasing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import errors
from .fpcore import check_prime, coords_table, encode_point
from .grassmann import Subspace, enumerate_subspaces
from .projlab import PointSet, hyperplane_functional

MASK64 = (1 << 64) - 1
COVERING_CONSTANT = 21
KINDS = ("st_product", "cylinder", "planar_slab", "random")


class SplitMix64:
    GAMMA = 0x9E3779B97F4A7C15
    MUL1 = 0xBF58476D1CE4E5B9
    MUL2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MUL1) & MASK64
        z = ((z ^ (z >> 27)) * self.MUL2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53


def round_half_down(x: float) -> int:
    """Nearest integer to x, halves rounded down."""
    return math.ceil(x - 0.5)


def floor_pow(p: int, e: float) -> int:
    # 1e-9 absorbs pow() error when p^e is an exact integer (e.g. e = 0).
    return math.floor(p**e + 1e-9)


def random_subset(candidates: Sequence[int] | np.ndarray, m: int, rng: SplitMix64) -> np.ndarray:
    pool = np.array(sorted(int(c) for c in candidates), dtype=np.int64)
    if not 0 <= m <= pool.size:
        raise errors.InvalidInputError(f"cannot draw {m} points from {pool.size}")
    for i in range(m):
        j = i + rng.below(pool.size - i)
        pool[i], pool[j] = pool[j], pool[i]
    return np.sort(pool[:m])


def random_set(p: int, n: int, a: float, seed: int, override: bool = False) -> PointSet:
    """Uniform subset of F_p^n of size round_half_down(p^a), fixed by the seed."""
    p = check_prime(p)
    if not 0 < a <= n:
        raise errors.InvalidInputError(f"need 0 < a <= n, got a={a}")
    errors.check_points(p, n, override)
    m = round_half_down(p**a)
    if m > p**n:
        raise errors.InvalidInputError(f"round(p^a) = {m} exceeds p^n = {p**n}")
    if m == p**n:
        return PointSet.full(p, n, override)
    picked = random_subset(np.arange(p**n), m, SplitMix64(seed))
    return PointSet.from_indices(p, n, picked, override)


@dataclass
class ConstructionResult:
    """A point set plus directions whose projection counts are provably small.

    ``k`` is the projection dimension: predicted directions lie in G(n-k).
    """

    A: PointSet
    predicted_directions: list[Subspace]
    predicted_count_bound: float | None
    k: int | None = None
    note: str = ""


def st_product(p: int, a: float, s: float) -> ConstructionResult:
    """{(x, y) : |x| <= p^(a-s), |y| <= p^s} with slopes |k| <= p^(2s-a).

    Every point lies on a line y = kx + m with |m| <= 2 p^s, so each predicted
    direction span{(1, k)} meets A in at most 4 p^s + 1 <= 21 p^s cosets;
    reduction mod p only merges cosets, so the count bound survives wrapping.
    """
    p = check_prime(p)
    if not 0 < s < 1:
        raise errors.InvalidInputError(f"need 0 < s < 1, got s={s}")
    if 2 * s < a:
        raise errors.InvalidInputError(f"need 2s >= a, got a={a}, s={s}")
    nk, nx, ny = floor_pow(p, 2 * s - a), floor_pow(p, a - s), floor_pow(p, s)
    if max(nk, nx, ny) * 2 + 1 > p:
        raise errors.InvalidInputError("construction would wrap mod p")
    xs = np.arange(-nx, nx + 1) % p
    ys = np.arange(-ny, ny + 1) % p
    pts = [(int(x), int(y)) for x in xs for y in ys]
    A = PointSet.from_points(p, 2, pts)
    dirs = [Subspace.from_rows([[1, k % p]], p, 2) for k in range(-nk, nk + 1)]
    note = f"st_product p={p} a={a} s={s}: |x|<={nx}, |y|<={ny}, |k|<={nk}"
    return ConstructionResult(A, dirs, COVERING_CONSTANT * p**s, k=1, note=note)


def horizontal_lift(v: Subspace) -> Subspace:
    """V x {0} inside F_p^(n+1)."""
    return Subspace.from_rows([list(r) + [0] for r in v.basis], v.p, v.n + 1)


def vertical_lift(v: Subspace) -> Subspace:
    """V + span{e_(n+1)} inside F_p^(n+1)."""
    rows = [list(r) + [0] for r in v.basis] + [[0] * v.n + [1]]
    return Subspace.from_rows(rows, v.p, v.n + 1)


def pencil(v: Subspace) -> list[Subspace]:
    """The graphs {(x, phi(x)) : x in V} over all linear phi: V -> F_p.

    These are the p^dim(V) subspaces of V + span{e_(n+1)} with the same
    dimension as V that miss the vertical axis. Over A' x F_p they all give
    p * #pi_V(A') cosets.
    """
    p, d = v.p, v.k
    out = []
    for c in coords_table(p, d) if d else [()]:
        rows = [list(r) + [int(ci)] for r, ci in zip(v.basis, c)]
        out.append(Subspace.from_rows(rows, p, v.n + 1) if rows else Subspace.zero(p, v.n + 1))
    return out


def cylinder(p: int, n: int, base: "ConstructionResult | ConstructionSpec") -> ConstructionResult:
    """A' x F_p, with every base prediction lifted to V' + span{e_n}.

    Cosets of a vertically lifted direction factor through the base, so the
    lifted counts equal the base counts and the base bound carries over.
    """
    if isinstance(base, ConstructionSpec):
        base = base.build()
    b = base.A
    if b.p != p or b.n != n - 1:
        raise errors.InvalidInputError(f"base lives in F_{b.p}^{b.n}, need F_{p}^{n - 1}")
    errors.check_points(p, n)
    step = p ** (n - 1)
    idx = (b.indices()[None, :] + step * np.arange(p)[:, None]).ravel()
    A = PointSet.from_indices(p, n, idx)
    dirs = [vertical_lift(v) for v in base.predicted_directions]
    note = f"cylinder over [{base.note}]"
    return ConstructionResult(A, dirs, base.predicted_count_bound, k=base.k, note=note)


def planar_slab(p: int, n: int, sub_dim: int, slab_exponent: float, k: int | None = None) -> ConstructionResult:
    """F_p^sub_dim x I^(n-sub_dim) with #I = round_half_down(p^slab_exponent).

    Directions V in G(n-k) inside F_p^sub_dim x {0} keep the slab coordinates,
    so #pi_V(A) = p^(sub_dim - (n-k)) * #I^(n-sub_dim) exactly.
    """
    p = check_prime(p)
    if not 0 < sub_dim < n:
        raise errors.InvalidInputError(f"need 0 < sub_dim < n, got {sub_dim}")
    if not 0 <= slab_exponent < 1:
        raise errors.InvalidInputError(f"need 0 <= slab_exponent < 1, got {slab_exponent}")
    k = n - 1 if k is None else k
    if not 0 < k < n:
        raise errors.InvalidInputError(f"need 0 < k < n, got k={k}")
    errors.check_points(p, n)
    width = round_half_down(p**slab_exponent)
    table = coords_table(p, n)
    A = PointSet(p, n, np.all(table[:, sub_dim:] < width, axis=1))
    dim = n - k
    dirs: list[Subspace] = []
    bound = None
    if dim <= sub_dim:
        pad = [0] * (n - sub_dim)
        dirs = [
            Subspace.from_rows([list(r) + pad for r in v.basis], p, n)
            for v in enumerate_subspaces(p, sub_dim, dim)
        ]
        bound = float(p ** (sub_dim - dim) * width ** (n - sub_dim))
    note = f"planar_slab p={p} n={n} sub_dim={sub_dim} #I={width}"
    return ConstructionResult(A, dirs, bound, k=k, note=note)


@dataclass
class ConstructionSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    base: "ConstructionSpec | None" = None
    note: str = ""

    def build(self) -> ConstructionResult:
        q = self.params
        try:
            if self.kind == "st_product":
                return st_product(int(q["p"]), float(q["a"]), float(q["s"]))
            if self.kind == "cylinder":
                if self.base is None:
                    raise errors.InvalidInputError("cylinder needs a base construction")
                base = self.base.build()
                return cylinder(base.A.p, int(q.get("n", base.A.n + 1)), base)
            if self.kind == "planar_slab":
                k = int(q["k"]) if "k" in q else None
                return planar_slab(int(q["p"]), int(q["n"]), int(q["sub_dim"]), float(q["slab_exponent"]), k)
            if self.kind == "random":
                A = random_set(int(q["p"]), int(q["n"]), float(q["a"]), int(q.get("seed", 0)))
                return ConstructionResult(A, [], None, note=f"random seed={q.get('seed', 0)}")
        except KeyError as exc:
            raise errors.InvalidInputError(f"{self.kind} is missing parameter {exc.args[0]!r}") from exc
        raise errors.InvalidInputError(f"unknown construction kind {self.kind!r}; choose from {KINDS}")


def parse_construct(text: str) -> ConstructionSpec:
    """Parse ``kind:param=value,...``.

    For cylinders, ``base=<kind>`` names the base construction and every other
    parameter except ``n`` is handed to the base. A base that takes ``n`` gets
    the cylinder's n - 1.
    """
    kind, _, rest = text.strip().partition(":")
    params: dict[str, str] = {}
    for item in filter(None, (t.strip() for t in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise errors.InvalidInputError(f"bad construction parameter {item!r}")
        params[key.strip()] = value.strip()
    if kind == "cylinder":
        base_kind = params.pop("base", None)
        if base_kind is None:
            raise errors.InvalidInputError("cylinder needs base=<kind>")
        outer = {"n": params.pop("n")} if "n" in params else {}
        if outer and base_kind != "st_product":
            try:
                params["n"] = str(int(outer["n"]) - 1)
            except ValueError as exc:
                raise errors.InvalidInputError(f"bad cylinder dimension {outer['n']!r}") from exc
        return ConstructionSpec(kind, outer, base=ConstructionSpec(base_kind, params))
    if kind not in KINDS:
        raise errors.InvalidInputError(f"unknown construction kind {kind!r}; choose from {KINDS}")
    return ConstructionSpec(kind, params)


def hyperplane_points(h0: Subspace, offset: int) -> np.ndarray:
    """Indices of the translate {x : x . xi = offset} of a hyperplane h0."""
    xi = hyperplane_functional(h0)
    table = coords_table(h0.p, h0.n)
    return np.flatnonzero(table @ xi % h0.p == offset % h0.p)


def point(p: int, n: int, coords: Sequence[int]) -> PointSet:
    return PointSet.from_indices(p, n, [encode_point(coords, p, n)])
