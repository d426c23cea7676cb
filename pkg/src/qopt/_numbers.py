from __future__ import annotations

from fractions import Fraction
from math import lcm


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through their shortest repr, not their binary value."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def format_rational(value) -> str:
    """Exact text form: an integer, a terminating decimal, or ``p/q``."""
    q = as_fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = abs(q.numerator) * 10**digits // q.denominator
    sign = "-" if q < 0 else ""
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def common_scale(values) -> int:
    """Smallest positive integer that turns every value into an integer."""
    scale = 1
    for v in values:
        scale = lcm(scale, as_fraction(v).denominator)
    return scale
