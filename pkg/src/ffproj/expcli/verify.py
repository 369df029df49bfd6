"""Empirical checks of the main estimate and the lemmas behind it.

Implicit constants are never asserted; every check reports the measured
ratio of the two sides. ``log p`` is the natural logarithm throughout.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

from ..errors import InvalidInputError
from ..fpcore import decode_point
from ..grassmann import Subspace, dual, format_subspace
from ..projlab import (
    ExceptionalReport,
    PointSet,
    exceptional_set,
    falconer_rhs,
    max_hyperplane_load,
    projection_count,
    slice_set,
)
from .bounds import in_theorem_range, main_exponent

CSV_COLUMNS = (
    "p",
    "n",
    "k",
    "construction",
    "seed",
    "a_target",
    "a",
    "s",
    "cardinality",
    "exceptional",
    "M",
    "main_t",
    "main_ratio",
    "falconer_ratio",
    "falconer_free_ratio",
    "in_range",
    "status",
    "error",
)


@dataclass
class SweepRecord:
    p: int
    n: int
    k: int
    construction: str = ""
    seed: int | None = None
    a_target: float | None = None
    a: float | None = None
    s: float = 0.0
    cardinality: int = 0
    exceptional: int = 0
    M: int = 0
    main_t: float | None = None
    main_ratio: float | None = None
    falconer_ratio: float | None = None
    falconer_free_ratio: float | None = None
    in_range: bool = False
    status: str = "ok"
    error: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _nonempty(A: PointSet) -> None:
    if A.cardinality < 1:
        raise InvalidInputError("the point set must be nonempty")


def verify_theorem(
    A: PointSet,
    k: int,
    s: float,
    construction: str = "",
    seed: int | None = None,
    a_target: float | None = None,
    report: ExceptionalReport | None = None,
    workers: int = 1,
) -> SweepRecord:
    """Measure #E_s(A) against log p * p^t(a, s) and the Falconer-type forms."""
    _nonempty(A)
    if report is None:
        report = exceptional_set(A, k, s, workers=workers)
    p, n, a = A.p, A.n, A.a
    t = main_exponent(n, k, a, s)
    e = len(report.exceptional)
    return SweepRecord(
        p=p,
        n=n,
        k=k,
        construction=construction,
        seed=seed,
        a_target=a_target,
        a=a,
        s=float(s),
        cardinality=A.cardinality,
        exceptional=e,
        M=report.M,
        main_t=t,
        main_ratio=e / (math.log(p) * p**t),
        falconer_ratio=e / falconer_rhs(A, k, s, report.M) if e else 0.0,
        falconer_free_ratio=e / p ** (k * (n - k) + s - a),
        in_range=in_theorem_range(n, k, a, s),
    )


class FalconerCheck(NamedTuple):
    lhs: int
    M: int
    rhs: float
    ratio: float
    free_rhs: float
    free_ratio: float


def verify_falconer(A: PointSet, k: int, s: float, report: ExceptionalReport | None = None) -> FalconerCheck:
    """#E_s(A) against M p^(n-k+s-a) and against the M-free p^(k(n-k)+s-a)."""
    _nonempty(A)
    if report is None:
        report = exceptional_set(A, k, s)
    e = len(report.exceptional)
    rhs = falconer_rhs(A, k, s, report.M)
    free_rhs = A.p ** (k * (A.n - k) + s - A.a)
    return FalconerCheck(e, report.M, rhs, e / rhs if e else 0.0, free_rhs, e / free_rhs)


@dataclass
class SliceBound:
    index: int
    size: int
    lhs: int
    rhs: float
    ratio: float | None


@dataclass
class HyperReport:
    """Lemma-level data for the hyperplane argument; empty when Theta is empty."""

    p: int
    n: int
    k: int
    s: float
    cardinality: int
    M: int = 0
    xi0: tuple[int, ...] | None = None
    hyperplane: Subspace | None = None
    theta: list[Subspace] = field(default_factory=list)
    overlap_rhs: float | None = None
    overlap_ratio: float | None = None
    slices: list[SliceBound] = field(default_factory=list)
    fubini_lhs: int = 0
    fubini_rhs: int = 0
    dyadic_beta: int | None = None
    dyadic_slices: list[int] = field(default_factory=list)
    pigeonhole_ratio: float | None = None
    max_hyperplane_load: int = 0
    case2_threshold: float = 0.0

    @property
    def empty(self) -> bool:
        return not self.theta

    @property
    def case(self) -> int:
        return 1 if self.max_hyperplane_load >= self.case2_threshold else 2

    @property
    def min_slice_ratio(self) -> float | None:
        ratios = [b.ratio for b in self.slices if b.ratio is not None]
        return min(ratios) if ratios else None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["hyperplane"] = None if self.hyperplane is None else format_subspace(self.hyperplane)
        out["theta"] = [format_subspace(v) for v in self.theta]
        out["case"] = self.case
        out["min_slice_ratio"] = self.min_slice_ratio
        return out


def verify_hyper_lemmas(
    A: PointSet, k: int, s: float, report: ExceptionalReport | None = None
) -> HyperReport:
    """Slice A along H = dual(span{xi0}) and compare both sides of the slice lemma.

    For each translate H_i, the left side is sum over V in Theta of
    #pi_V(A cap H_i) and the right side is
    #Theta * min{p^(k-1), #(A cap H_i) p^(-(n-k)(k-1)) #Theta}.
    """
    _nonempty(A)
    if report is None:
        report = exceptional_set(A, k, s)
    p, n = A.p, A.n
    out = HyperReport(
        p, n, k, float(s), A.cardinality,
        max_hyperplane_load=max_hyperplane_load(A),
        case2_threshold=p ** (s + n - k - 1),
    )
    if report.xi0 is None or not report.theta:
        return out
    xi0 = decode_point(report.xi0, p, n)
    h = dual(Subspace.from_rows([xi0], p, n))
    theta = report.theta
    m = len(theta)
    dec = slice_set(A, h)
    fub_rhs = 0
    for i in range(p):
        part = dec.slice_set(i)
        lhs = sum(projection_count(v, part) for v in theta)
        fub_rhs += lhs
        size = part.cardinality
        rhs = m * min(p ** (k - 1), size * p ** (-(n - k) * (k - 1)) * m)
        out.slices.append(SliceBound(i, size, lhs, rhs, lhs / rhs if rhs > 0 else None))
    out.M = report.M
    out.xi0 = xi0
    out.hyperplane = h
    out.theta = list(theta)
    out.overlap_rhs = math.log(p) * p ** ((n - k) * (k - 1) + s - A.a)
    out.overlap_ratio = report.M / out.overlap_rhs
    out.fubini_lhs = sum(projection_count(v, A) for v in theta)
    out.fubini_rhs = fub_rhs
    if dec.best is not None:
        beta, members = dec.best
        out.dyadic_beta = beta
        out.dyadic_slices = list(members)
        out.pigeonhole_ratio = len(members) * 2**beta * math.log(p) / A.cardinality
    return out
