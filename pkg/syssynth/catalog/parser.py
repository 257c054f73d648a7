"""
Methods for turning instance documents into `ProblemInstance`s and back.

SPDX-License-Identifier: EUPL-1.2
"""

import json
import pathlib
from decimal import Decimal
from typing import IO

from pydantic import ValidationError

from syssynth._utils import json_default
from syssynth.catalog import (
    InstanceParseError,
    ProblemInstance,
    ShapeError,
    UnknownReferenceError,
)
from syssynth.catalog.validation import ViolationCode, validate_instance


def _decode(document: bytes | str | IO) -> str:
    if hasattr(document, "read"):
        document = document.read()  # type: ignore[union-attr]
    if isinstance(document, bytes):
        try:
            return document.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InstanceParseError(f"Instance document is not UTF-8: {e}") from e
    return document  # type: ignore[return-value]


def parse_instance(text: str) -> ProblemInstance:
    """
    Turn the JSON text of an instance document into a `ProblemInstance`
    without resolving references.
    """
    try:
        # decimals keep rationals like 0.1 exact
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise InstanceParseError(
            f"Malformed instance document at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(data, dict):
        raise InstanceParseError("Instance document must be a JSON object")
    try:
        return ProblemInstance.parse_obj(data)
    except ValidationError as e:
        raise InstanceParseError(f"Invalid instance document: {e}") from e


def load_instance(document: bytes | str | IO) -> ProblemInstance:
    """
    Parse an instance document and bind all of its identifier references.
    Unknown identifiers raise `UnknownReferenceError`, vector entries outside
    the declared dimensions raise `ShapeError`. The remaining structural
    checks (duplicates, module partition) are left to `validate_instance`.
    """
    inst = parse_instance(_decode(document))
    violations = validate_instance(inst)
    for v in violations:
        if v.code == ViolationCode.UNKNOWN_REFERENCE:
            raise UnknownReferenceError(
                v.element, f"Unknown reference '{v.element}': {v.detail}"
            )
    for v in violations:
        if v.code == ViolationCode.SHAPE_MISMATCH:
            raise ShapeError(f"Shape mismatch in '{v.element}': {v.detail}")
    return inst


def read_instance(path: pathlib.Path | str) -> ProblemInstance:
    with open(path, "rb") as f:
        return load_instance(f.read())


def dump_instance(inst: ProblemInstance) -> str:
    return json.dumps(inst.dict(), indent=2, default=json_default) + "\n"


def write_instance(path: pathlib.Path | str, inst: ProblemInstance) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_instance(inst))
