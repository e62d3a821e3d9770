"""Height statistics of discrete bridges with arbitrary weighted jumps."""
from .walk import (
    JumpPolynomial,
    WalkProfile,
    center,
    parse_polynomial,
    period,
    reduced_gcd,
    structural_constants,
)

__all__ = [
    "JumpPolynomial",
    "WalkProfile",
    "center",
    "parse_polynomial",
    "period",
    "reduced_gcd",
    "structural_constants",
]
__version__ = "0.1.0"
