"""Exact rational parsing and formatting.

All quantities in the library are `fractions.Fraction`.  The file format
carries rationals as strings "p/q" (or plain integers); floats are
rejected everywhere so that weight sums and cycle signs stay exact.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import InstanceError


def parse_rational(raw) -> Fraction:
    """Parse an integer or a "p/q" string into a Fraction.

    Floats are rejected: decimal input would silently destroy exactness.
    """
    if isinstance(raw, bool):
        raise ValueError(f"not a rational: {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        raise ValueError(f"floats are not accepted, got {raw!r}; use a 'p/q' string")
    if isinstance(raw, str):
        text = raw.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"floats are not accepted, got {raw!r}; use a 'p/q' string")
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {raw!r}") from exc
    raise ValueError(f"not a rational: {raw!r}")


def format_rational(value: Fraction) -> str:
    """Render a Fraction as "p/q", or "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _reject_float(text):
    raise ValueError(f"floats are not accepted in instance files: {text!r}")


def loads_exact(text: str):
    """Parse JSON while refusing any float literal."""
    try:
        return json.loads(text, parse_float=_reject_float)
    except ValueError as exc:
        raise InstanceError([str(exc)]) from exc
