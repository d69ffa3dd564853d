"""Helpers for exact rational arithmetic at module boundaries."""

import math
from fractions import Fraction


def as_fraction(value) -> Fraction:
    """Coerce ints, "p/q" or decimal strings, floats, and Fractions to Fraction.

    Floats are read through their shortest decimal repr, so 0.1 becomes 1/10
    rather than the underlying binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} is not a rational")
        return Fraction(repr(value))
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def as_fraction_vector(values) -> tuple:
    return tuple(as_fraction(v) for v in values)


def format_fraction(value: Fraction):
    """Render a Fraction as an int when integral, else as a "p/q" string."""
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def fraction_ceil(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)


def common_denominator(values) -> int:
    """Least common multiple of the denominators of an iterable of Fractions."""
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return lcm
