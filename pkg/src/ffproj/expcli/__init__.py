"""Bound formulas, verifiers, sweeps and the command-line interface."""

from .bounds import BoundExponents, classical_exponents, conjectured_exponent, in_theorem_range, main_exponent
from .verify import SweepRecord, verify_falconer, verify_hyper_lemmas, verify_theorem

__all__ = [
    "BoundExponents",
    "SweepRecord",
    "classical_exponents",
    "conjectured_exponent",
    "in_theorem_range",
    "main_exponent",
    "verify_falconer",
    "verify_hyper_lemmas",
    "verify_theorem",
]
