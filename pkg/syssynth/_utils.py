"""
Miscellaneous utility methods that don't fit anywhere else.

SPDX-License-Identifier: EUPL-1.2
"""

import hashlib
import json
import re
from decimal import Decimal
from fractions import Fraction
from typing import Any

_NAME_UNSAFE = re.compile(r"[^A-Za-z0-9_]")


def sanitize_name(name: str) -> str:
    """
    Makes an identifier safe for the LP and MPS exchange formats. Anything that
    isn't a letter, digit or underscore becomes an underscore.

    >>> sanitize_name('pc1')
    'pc1'

    >>> sanitize_name('rs-232')
    'rs_232'

    >>> sanitize_name('cam.left eye')
    'cam_left_eye'

    """
    return _NAME_UNSAFE.sub("_", name)


def json_default(value: Any) -> Any:
    """
    `json.dumps` fallback for the number types we keep in our models. Integral
    values are written as integers. A `Decimal` that a float can't hold
    exactly is written as its decimal string, which the instance models read
    back unchanged. Fractions are reported as the nearest float.

    >>> json_default(Decimal("2.0"))
    2

    >>> json_default(Decimal("0.25"))
    0.25

    >>> json_default(Decimal("0.12345678901234567891"))
    '0.12345678901234567891'

    >>> json_default(Fraction(1, 4))
    0.25

    """
    if isinstance(value, (Decimal, Fraction)):
        if value == int(value):
            return int(value)
        if isinstance(value, Decimal) and Decimal(repr(float(value))) != value:
            return str(value)
        return float(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def canonical_json(data: Any) -> str:
    """
    Deterministic JSON text: sorted keys, no insignificant whitespace.

    >>> canonical_json({"b": 1, "a": [Decimal("1.5")]})
    '{"a":[1.5],"b":1}'

    """
    return json.dumps(
        data, sort_keys=True, separators=(",", ":"), default=json_default
    )


def sha256_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
