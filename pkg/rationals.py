"""Exact rational helpers.

Every quantity in this package is a `fractions.Fraction`. Inputs written as
decimals ("0.6") are converted exactly (3/5) before any computation; shuffle
files accept only the strict forms "p" and "p/q" with q > 0.
"""
from __future__ import annotations

import re
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Tuple, Union

from errors import RationalParseError

RationalLike = Union[int, Fraction, str, float]

_STRICT = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")
_DECIMAL = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)$")


def to_rational(value: RationalLike, *, strict: bool = False) -> Fraction:
    """Convert `value` to a Fraction without rounding.

    Floats are read through their shortest repr, so 0.6 becomes 3/5 exactly
    as if it had been typed on the command line. With `strict=True` only
    integer and "integer/positive-integer" strings are accepted.
    """
    if isinstance(value, bool):
        raise RationalParseError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if strict:
            raise RationalParseError(f"floating-point value not allowed here: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        if _STRICT.match(text):
            return Fraction(text)
        if not strict and _DECIMAL.match(text):
            return Fraction(text)
        raise RationalParseError(f"cannot read {value!r} as an exact rational")
    raise RationalParseError(f"unsupported rational type: {type(value).__name__}")


def parse_vector(text: str) -> Tuple[Fraction, ...]:
    """Parse a comma-separated list such as "3/5,0.6,1"."""
    parts = [part for part in text.split(",")]
    if not text.strip() or any(not part.strip() for part in parts):
        raise RationalParseError(f"malformed vector: {text!r}")
    return tuple(to_rational(part) for part in parts)


def format_rational(value: Fraction) -> str:
    """Canonical "p/q" rendering ("p" for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_vector(values: Iterable[Fraction]) -> str:
    return "(" + ", ".join(format_rational(v) for v in values) + ")"


def is_terminating(value: Fraction) -> bool:
    """True when the decimal expansion of `value` is finite."""
    den = value.denominator
    for prime in (2, 5):
        while den % prime == 0:
            den //= prime
    return den == 1


def format_decimal(value: Fraction, places: int = 12) -> str:
    """Exact decimal when it terminates, otherwise rounded to `places` digits."""
    with localcontext() as ctx:
        ctx.prec = 64
        number = Decimal(value.numerator) / Decimal(value.denominator)
        if not is_terminating(value):
            number = number.quantize(Decimal(1).scaleb(-places))
    text = format(number.normalize(), "f") if number != 0 else "0"
    return text


def format_exact(value: Fraction) -> str:
    """Exact decimal where terminating, "p/q" otherwise (surface tables)."""
    if is_terminating(value):
        return format_decimal(value)
    return format_rational(value)
