"""Exception types and the desk-scale size guard."""

import os

MAX_POINTS_DEFAULT = 1 << 24
MAX_DIRECTIONS = 1 << 22


class InvalidInputError(ValueError):
    """Malformed or out-of-domain input (CLI exit code 2)."""


class GuardExceededError(InvalidInputError):
    """Instance larger than the exhaustive-scan guard allows (CLI exit code 3)."""


def max_points() -> int:
    # FFPROJ_MAX_POINTS is read at call time so tests and the CLI can adjust it.
    raw = os.environ.get("FFPROJ_MAX_POINTS")
    if raw is None or raw.strip() == "":
        return MAX_POINTS_DEFAULT
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"FFPROJ_MAX_POINTS must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise InvalidInputError("FFPROJ_MAX_POINTS must be positive")
    return value


def check_points(p: int, n: int, override: bool = False) -> None:
    if not override and p**n > max_points():
        raise GuardExceededError(f"instance too large: p^n = {p**n} exceeds {max_points()}")


def check_directions(count: int, override: bool = False) -> None:
    if not override and count > MAX_DIRECTIONS:
        raise GuardExceededError(f"instance too large: {count} directions exceeds {MAX_DIRECTIONS}")
