"""Scalar modes and exact helpers shared by every module.

Two modes run through the whole toolkit: "rational" keeps every value a
fractions.Fraction and all comparisons exact; "float" uses binary float-64
with the documented tolerances.  Mode is fixed per object at construction,
mixing modes raises ModeError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ModeError

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

Scalar = Fraction | float

def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ModeError(f"unknown scalar mode {mode!r}; expected one of {MODES}")
    return mode


def as_scalar(value, mode: str) -> Scalar:
    """Coerce a number into the given mode.

    Rational mode accepts int and Fraction only; a float here is almost always
    an accident, so it is rejected instead of silently converted.
    """
    check_mode(mode)
    if mode == RATIONAL:
        if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            raise ModeError(f"rational mode needs int or Fraction, got {type(value).__name__}")
        return Fraction(value)
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise ModeError(f"float mode needs a real number, got {type(value).__name__}")
    return float(value)


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == RATIONAL else 0.0


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == RATIONAL else 1.0


@dataclass(frozen=True)
class Tolerances:
    """Numerical policy knobs; rational mode ignores eq and rank."""

    eq: float = 1e-12        # relative equality slack, float mode
    rank: float = 1e-9       # pivot threshold for rank decisions, float mode
    decay: float = 1e-6      # last/first ratio that counts as "reached zero"
    opnorm_safety: float = 1e-6  # sampled operator-norm inflation, float fallback


DEFAULT_TOLERANCES = Tolerances()


def approx_equal(a: Scalar, b: Scalar, mode: str, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    if mode == RATIONAL:
        return a == b
    scale = max(1.0, abs(a), abs(b))
    return abs(a - b) <= tol.eq * scale


def is_zero(a: Scalar, mode: str, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    if mode == RATIONAL:
        return a == 0
    return abs(a) <= tol.eq


def ceil_scalar(a: Scalar) -> int:
    """Exact ceiling; Fraction and float both supported."""
    return math.ceil(a)


def geometric_sum(ratio: Scalar, first: int, last: int) -> Scalar:
    """sum_{n=first}^{last} ratio**n, exact for Fraction ratios.

    Empty ranges (last < first) give 0; ratio == 1 degenerates to a count.
    """
    if last < first:
        return ratio - ratio  # typed zero
    if ratio == 1:
        return (last - first + 1) * (ratio / ratio)
    return (ratio**first - ratio ** (last + 1)) / (1 - ratio)


def geometric_tail_bound(scale: Scalar, ratio: Scalar, start: int) -> Scalar:
    """Upper bound for scale * sum_{n >= start} ratio**n when 0 <= ratio < 1."""
    if not 0 <= ratio < 1:
        raise ValueError(f"tail bound needs 0 <= ratio < 1, got {ratio}")
    return scale * ratio**start / (1 - ratio)
