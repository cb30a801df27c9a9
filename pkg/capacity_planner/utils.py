"""
Utility functions for the capacity planner.

This module provides common helpers used across the capacity planner,
including quantity parsing with unit suffixes and display rounding of
rates, counts and ratios.
"""

import math
import re
from fractions import Fraction

from .errors import InputDomainError

_SUFFIXES = {
    "": 1,
    "k": 1_000,
    "K": 1_000,
    "M": 1_000_000,
    "G": 1_000_000_000,
    "T": 1_000_000_000_000,
}

_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)\s*([kKMGT]?)\s*$")


def parse_quantity(text):
    """
    Parse a number that may use scientific notation or a k/M/G/T suffix.

    Args:
        text (str): Text such as "1e9", "10G", "1.5M" or "1460"

    Returns:
        float: The parsed value

    Raises:
        InputDomainError: If the text is not a number
    """
    if isinstance(text, (int, float)):
        return float(text)

    if text.strip().lower() in ("inf", "infinity", "unbounded"):
        return math.inf

    match = _QUANTITY_RE.match(text)
    if not match:
        raise InputDomainError(f"not a number: {text!r}")

    number, suffix = match.groups()
    return float(number) * _SUFFIXES[suffix]


def to_fraction(value):
    """
    Convert an int, float or decimal string to an exact Fraction.

    Floats go through their shortest repr so that 2.5 becomes 5/2 rather
    than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputDomainError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InputDomainError(f"not a finite number: {value!r}")
        return Fraction(repr(value))
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise InputDomainError(f"not a number: {value!r}") from None


def format_rate(bps):
    """
    Format a rate in bits/s the way the capacity tables print it.

    Rates of at least 1 Mbit/s get two decimals in Mbit/s or Gbit/s.

    Args:
        bps (float): Rate in bits per second

    Returns:
        str: Display string such as "57.44 Mbit/s"
    """
    if math.isinf(bps):
        return "unbounded"
    if abs(bps) >= 1e9:
        return f"{bps / 1e9:.2f} Gbit/s"
    if abs(bps) >= 1e6:
        return f"{bps / 1e6:.2f} Mbit/s"
    if abs(bps) >= 1e3:
        return f"{bps / 1e3:.2f} kbit/s"
    return f"{bps:.2f} bit/s"


def format_count(value, unit=""):
    """Format an integral count with thousands separators."""
    text = f"{int(value):,}"
    return f"{text} {unit}" if unit else text


def format_bytes(value):
    if math.isinf(value):
        return "unbounded"
    if float(value).is_integer():
        return f"{int(value):,} B"
    return f"{value:,.2f} B"


def format_ratio(ratio):
    """
    Format a ratio as "N:1".

    Args:
        ratio (Fraction or float): Downstream over upstream

    Returns:
        str: Display string such as "12:1" or "2.4:1"
    """
    value = float(ratio)
    if value.is_integer():
        return f"{int(value)}:1"
    return f"{value:.4g}:1"


def format_number(value, digits=6):
    if math.isinf(value):
        return "inf"
    return f"{value:.{digits}g}"


def format_seconds(seconds):
    """Format a small duration using ns/us/ms units."""
    if seconds < 1e-6:
        return f"{seconds * 1e9:.1f} ns"
    if seconds < 1e-3:
        return f"{seconds * 1e6:.1f} us"
    if seconds < 1:
        return f"{seconds * 1e3:.1f} ms"
    return f"{seconds:.3f} s"
