"""
Base types shared by the syssynth models.

SPDX-License-Identifier: EUPL-1.2
"""

from enum import Enum

from pydantic import BaseModel, Extra


class SynthModel(BaseModel):
    """Base for every value type read from or written to a document."""

    class Config:
        # don't allow adding arbitrary extra fields that we didn't define
        extra = Extra.forbid
        # instances are shared read-only between threads and worker processes
        allow_mutation = False
        validate_all = True
        anystr_strip_whitespace = True


class StrEnum(str, Enum):
    """Closed vocabulary that reads and writes as its plain values."""

    def __str__(self) -> str:
        return self.value
