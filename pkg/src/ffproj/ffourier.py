"""Fourier analysis on F_p^n.

The transform is the definitional character sum

    f^(xi) = sum_x f(x) e_p(-x . xi),     e_p(t) = exp(2 pi i t / p),

evaluated as n successive length-p transforms, one per coordinate axis (the
character factorises over coordinates). Values are complex doubles; callers
that need exact answers threshold against the known integer gaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import errors
from .fpcore import check_prime, coords_table, span_points
from .grassmann import AffinePlane, Subspace

PHYSICAL = "physical"
FREQUENCY = "frequency"


@dataclass(frozen=True)
class GridFunction:
    p: int
    n: int
    values: np.ndarray
    side: str = PHYSICAL

    def __post_init__(self):
        if self.values.shape != (self.p**self.n,):
            raise errors.InvalidInputError(f"grid function needs {self.p}^{self.n} values")
        if self.side not in (PHYSICAL, FREQUENCY):
            raise errors.InvalidInputError(f"unknown side {self.side!r}")

    @classmethod
    def zeros(cls, p: int, n: int, side: str = PHYSICAL) -> "GridFunction":
        return cls(p, n, np.zeros(p**n, dtype=complex), side)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.p, self.n, self.values - other.values, self.side)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        _same_grid(self, other)
        return GridFunction(self.p, self.n, self.values + other.values, self.side)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if (f.p, f.n, f.side) != (g.p, g.n, g.side):
        raise errors.InvalidInputError("grid functions live on different grids")


def indicator(p: int, n: int, points: Iterable[int]) -> GridFunction:
    vals = np.zeros(p**n, dtype=complex)
    vals[np.fromiter((int(i) for i in points), dtype=np.int64)] = 1.0
    return GridFunction(p, n, vals)


def subspace_indicator(v: Subspace) -> GridFunction:
    return indicator(v.p, v.n, v.points())


def plane_indicator(w: AffinePlane) -> GridFunction:
    d = w.direction
    return indicator(d.p, d.n, w.points())


@lru_cache(maxsize=32)
def character_matrix(p: int, sign: int) -> np.ndarray:
    """C[xi, x] = e_p(sign * x * xi), with the product reduced mod p before exp."""
    r = np.arange(p)
    m = np.exp(sign * 2j * np.pi * (np.outer(r, r) % p) / p)
    m.flags.writeable = False
    return m


def _axis_transform(values: np.ndarray, p: int, n: int, sign: int) -> np.ndarray:
    grid = values.reshape((p,) * n)
    mat = character_matrix(p, sign)
    for ax in range(n):
        grid = np.moveaxis(np.tensordot(mat, grid, axes=([1], [ax])), 0, ax)
    return grid.reshape(-1)


def dft(f: GridFunction) -> GridFunction:
    if f.side != PHYSICAL:
        raise errors.InvalidInputError("dft expects a physical-side function")
    check_prime(f.p)
    return GridFunction(f.p, f.n, _axis_transform(f.values, f.p, f.n, -1), FREQUENCY)


def idft(g: GridFunction) -> GridFunction:
    if g.side != FREQUENCY:
        raise errors.InvalidInputError("idft expects a frequency-side function")
    vals = _axis_transform(g.values, g.p, g.n, +1) / g.p**g.n
    return GridFunction(g.p, g.n, vals, PHYSICAL)


def plancherel_residual(f: GridFunction) -> float:
    """|sum |f|^2 - p^-n sum |f^|^2|."""
    return abs(f.norm2() - dft(f).norm2() / f.p**f.n)


def high_low_split(f: GridFunction) -> tuple[GridFunction, GridFunction]:
    """(low, high): the constant mean function and the mean-zero remainder."""
    if f.side != PHYSICAL:
        raise errors.InvalidInputError("high_low_split expects a physical-side function")
    low = GridFunction(f.p, f.n, np.full(f.values.shape, f.values.mean(), dtype=complex))
    return low, f - low


def support(g: GridFunction, cutoff: float) -> np.ndarray:
    return np.flatnonzero(np.abs(g.values) > cutoff)


def dual_oracle(v: Subspace, tol: float = 1e-6, override: bool = False) -> Subspace:
    """The dual computed as supp of the transform of 1_V.

    Raises if the support is not a subspace or if a support value is not
    p^dim(V) within ``tol``.
    """
    errors.check_points(v.p, v.n, override)
    spec = dft(subspace_indicator(v))
    height = v.p**v.k
    supp = support(spec, height / 2)
    if np.max(np.abs(spec.values[supp] - height)) > tol:
        raise errors.InvalidInputError("indicator transform is not p^k on its support")
    span = Subspace.from_rows(coords_table(v.p, v.n)[supp], v.p, v.n)
    if not np.array_equal(span_points(span.matrix, v.p, v.n), np.sort(supp)):
        raise errors.InvalidInputError("support of the indicator transform is not a subspace")
    return span


def family_function(planes: Iterable[AffinePlane]) -> GridFunction:
    """sum_W (1_W - p^-codim) over a family of parallel cosets."""
    planes = list(planes)
    if not planes:
        raise errors.InvalidInputError("family_function needs at least one plane")
    d = planes[0].direction
    vals = np.zeros(d.p**d.n, dtype=complex)
    for w in planes:
        vals[w.points()] += 1.0
    vals -= len(planes) * float(d.p) ** (d.k - d.n)
    return GridFunction(d.p, d.n, vals)
