"""Exponent formulas for exceptional-set bounds.

All exponents are powers of p: a bound ``e`` means #E_s(A) <~ p^e.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidInputError


def _check_nk(n: int, k: int) -> None:
    if not 0 < k < n:
        raise InvalidInputError(f"need 0 < k < n, got n={n}, k={k}")


def main_exponent(n: int, k: int, a: float, s: float) -> float:
    """t(a, s) = max{k(n-k) + 2(s-a), (k-1)(n-k)}."""
    _check_nk(n, k)
    return float(max(k * (n - k) + 2 * (s - a), (k - 1) * (n - k)))


def theorem_threshold(n: int, k: int, a: float) -> float:
    """The main estimate applies for s below (a + 2k - n) / 2."""
    return (a + 2 * k - n) / 2


def in_theorem_range(n: int, k: int, a: float, s: float) -> bool:
    return 0 < s < min(k, a) and s < theorem_threshold(n, k, a)


def conjectured_exponent(target: str, a: float, s: float) -> float:
    """Lower bounds for T(a, s) in F_p^3, projections to lines (k=1) or planes (k=2).

    Breakpoints follow the printed inequalities verbatim: a branch written
    with "<=" includes its right endpoint.
    """
    if not 0 < a <= 3:
        raise InvalidInputError(f"need 0 < a <= 3, got a={a}")
    if target == "lines":
        if not 0 < s < min(1, a):
            raise InvalidInputError(f"lines need 0 < s < min(1, a), got s={s}")
        if a <= 1:
            return 1.0
        if a <= 2:
            if s <= (a - 1) / 2:
                return 0.0
            if s <= a - 1:
                return 1 + 2 * s - a
            return 1.0
        return 0.0 if s <= (a - 1) / 2 else 1 + 2 * s - a
    if target == "planes":
        if not 0 < s < min(2, a):
            raise InvalidInputError(f"planes need 0 < s < min(2, a), got s={s}")
        if a <= 1:
            return max(0.0, 2 * s - a)
        if a <= 2:
            if s <= a / 2:
                return 0.0
            if s <= 1:
                return 2 * s - a
            if s <= (a + 1) / 2:
                return 1.0
            return 2 * s - a
        if s <= a - 1:
            return 0.0
        if s <= (a + 1) / 2:
            return 1.0
        return 2 * s - a
    raise InvalidInputError(f"target must be 'lines' or 'planes', got {target!r}")


@dataclass(frozen=True)
class BoundExponents:
    kaufman: float
    falconer: float
    he_threshold: tuple[float, float]
    main_t: float
    conjectured_lines: float | None = None
    conjectured_planes: float | None = None


def classical_exponents(n: int, k: int, a: float, s: float) -> BoundExponents:
    """Kaufman, Falconer and He exponents alongside t(a, s).

    The conjectured n=3 value is filled in for the matching target (k=1
    lines, k=2 planes) when (a, s) lies in its domain.
    """
    _check_nk(n, k)
    lines = planes = None
    if n == 3:
        try:
            if k == 1:
                lines = conjectured_exponent("lines", a, s)
            else:
                planes = conjectured_exponent("planes", a, s)
        except InvalidInputError:
            pass
    return BoundExponents(
        kaufman=k * (n - k) + s - k,
        falconer=max(k * (n - k) + s - a, 0),
        he_threshold=(k / n * a, k * (n - k) - 1),
        main_t=main_exponent(n, k, a, s),
        conjectured_lines=lines,
        conjectured_planes=planes,
    )
