"""
Exact rational arithmetic helpers. Documents carry decimals, generation and
solving work on `Fraction`s so that objective values and tie-breaking are
exact.

SPDX-License-Identifier: EUPL-1.2
"""

import math
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

Number = int | Decimal | Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(v: Number | float) -> Fraction:
    """
    >>> to_fraction(Decimal("0.1"))
    Fraction(1, 10)

    >>> to_fraction(3)
    Fraction(3, 1)

    """
    if isinstance(v, float):
        # floats only reach us from user input on the command line
        return Fraction(Decimal(repr(v)))
    return Fraction(v)


def number_to_str(v: Number | float, *, precision=6) -> str:
    """
    Fixed-point text for reports, 6 decimal places unless asked otherwise,
    without trailing zeros or a dangling point and never in scientific
    notation. Negative zero prints as 0.

    >>> number_to_str(Fraction(1, 4))
    '0.25'

    >>> number_to_str(1000)
    '1000'

    >>> number_to_str(Fraction(1, 3))
    '0.333333'

    >>> number_to_str(Fraction(2, 1000000000), precision=12)
    '0.000000002'

    >>> number_to_str(-0.0)
    '0'

    """
    s = f"{float(v):.{precision}f}".rstrip("0").rstrip(".")
    if s == "-0":
        return "0"
    return s


def fraction_to_str(v: Fraction) -> str:
    """
    Exact textual form, used in solution documents.

    >>> fraction_to_str(Fraction(1, 2))
    '1/2'

    >>> fraction_to_str(Fraction(4))
    '4'

    """
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def parse_fraction(text: str) -> Fraction:
    """
    >>> parse_fraction("3/4")
    Fraction(3, 4)

    >>> parse_fraction("0.5")
    Fraction(1, 2)

    """
    return Fraction(text)


def common_denominator(values: Iterable[Fraction]) -> int:
    """
    Least common multiple of the denominators, used to scale a row of rational
    coefficients to integers.

    >>> common_denominator([Fraction(1, 2), Fraction(1, 3), Fraction(4)])
    6

    """
    lcm = 1
    for v in values:
        lcm = math.lcm(lcm, v.denominator)
    return lcm
