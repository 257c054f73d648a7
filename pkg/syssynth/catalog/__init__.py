"""
Domain data model for system synthesis problem instances: the catalog of
devices, tasks and functional modules together with the mission they have to
serve.

All numeric fields are kept as `Decimal` so that a document round-trips
exactly; consumers convert to `Fraction` through :func:`value`.

SPDX-License-Identifier: EUPL-1.2
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Literal, Mapping, Union

from pydantic import Field, condecimal, conint, validator

from syssynth._config import SynthModel
from syssynth.number import to_fraction

LOOPBACK = "loopback"
UNBOUNDED = "unbounded"

NonNegative = condecimal(ge=0)
ResourceMap = dict[str, NonNegative]  # type: ignore[valid-type]


def value(mapping: Mapping[str, Decimal], key: str) -> Fraction:
    """Entry of a sparse vector; absent keys mean 0."""
    v = mapping.get(key)
    if v is None:
        return Fraction(0)
    return to_fraction(v)


class InstanceError(ValueError):
    """Raised when an instance document can't be turned into a model."""


class InstanceParseError(InstanceError):
    pass


class UnknownReferenceError(InstanceError):
    def __init__(self, reference: str, message: str):
        super().__init__(message)
        self.reference = reference


class ShapeError(InstanceError):
    pass


class ResourceDef(SynthModel):
    id: str
    unit: str = ""


class TransportDef(SynthModel):
    id: str
    bandwidth: Union[Literal["unbounded"], NonNegative] = UNBOUNDED  # type: ignore[valid-type]
    overhead_factor: condecimal(ge=1) = Decimal(1)  # type: ignore[valid-type]
    physical: bool = True

    @property
    def is_bounded(self) -> bool:
        return self.bandwidth != UNBOUNDED

    def bandwidth_value(self) -> Fraction | None:
        """Bandwidth as a rational, `None` when unbounded."""
        if self.bandwidth == UNBOUNDED:
            return None
        return to_fraction(self.bandwidth)  # type: ignore[arg-type]


class Dimensions(SynthModel):
    resources: list[ResourceDef] = Field(default_factory=list)
    transports: list[TransportDef] = Field(default_factory=list)
    context_dims: list[str] = Field(default_factory=list)
    function_dims: list[str] = Field(default_factory=list)
    message_types: list[str] = Field(default_factory=list)
    # labels for the semantic content vectors of ports
    semantic_dims: list[str] = Field(default_factory=list)

    @validator("resources", pre=True, each_item=True)
    @classmethod
    def _v_resource(cls, v):
        # a bare identifier is a resource without a unit label
        if isinstance(v, str):
            return {"id": v}
        return v

    def resource_ids(self) -> list[str]:
        return [r.id for r in self.resources]

    def transport_ids(self) -> list[str]:
        return [t.id for t in self.transports]


class Device(SynthModel):
    id: str
    resources: ResourceMap = Field(default_factory=dict)
    cnx_capacity: dict[str, conint(ge=0)] = Field(default_factory=dict)  # type: ignore[valid-type]
    # resources granted to a device connected through the given transport
    exposes: dict[str, ResourceMap] = Field(default_factory=dict)
    cost: NonNegative = Decimal(0)  # type: ignore[valid-type]

    def capacity(self, transport: str) -> int:
        return self.cnx_capacity.get(transport, 0)


class OutputPort(SynthModel):
    id: str
    msg_type: str
    provides: ResourceMap = Field(default_factory=dict)
    nominal_rate: NonNegative = Decimal(0)  # type: ignore[valid-type]


class InputPort(SynthModel):
    id: str
    msg_type: str
    requires: ResourceMap = Field(default_factory=dict)


class Task(SynthModel):
    id: str
    # a device missing from this map can't execute the task
    consumption: dict[str, ResourceMap] = Field(default_factory=dict)
    context_req: ResourceMap = Field(default_factory=dict)
    inputs: list[InputPort] = Field(default_factory=list)
    outputs: list[OutputPort] = Field(default_factory=list)


class Module(SynthModel):
    id: str
    devices: list[str] = Field(default_factory=list)
    tasks: list[str] = Field(default_factory=list)
    capability: ResourceMap = Field(default_factory=dict)
    overhead_cost: NonNegative = Decimal(0)  # type: ignore[valid-type]

    @property
    def size(self) -> int:
        return len(self.devices) + len(self.tasks)


class Mission(SynthModel):
    context: ResourceMap = Field(default_factory=dict)
    requirements: ResourceMap = Field(default_factory=dict)
    cnx_forbidden: list[tuple[str, str]] = Field(default_factory=list)

    def forbids(self, a: str, b: str) -> bool:
        return any({a, b} == {u, v} for u, v in self.cnx_forbidden)


class ProblemInstance(SynthModel):
    dims: Dimensions = Field(default_factory=Dimensions)
    devices: list[Device] = Field(default_factory=list)
    tasks: list[Task] = Field(default_factory=list)
    modules: list[Module] = Field(default_factory=list)
    mission: Mission = Field(default_factory=Mission)
    # module/device cost, execution cost, connection and routing cost
    weights: tuple[NonNegative, NonNegative, NonNegative] = (  # type: ignore[valid-type]
        Decimal(1),
        Decimal(1),
        Decimal(1),
    )

    def index(self) -> "InstanceIndex":
        return InstanceIndex.of(self)

    def weight_values(self) -> tuple[Fraction, Fraction, Fraction]:
        w1, w2, w3 = self.weights
        return (to_fraction(w1), to_fraction(w2), to_fraction(w3))


@dataclass(frozen=True)
class InstanceIndex:
    """Identifier lookups over a validated instance."""

    devices: dict[str, Device]
    tasks: dict[str, Task]
    modules: dict[str, Module]
    transports: dict[str, TransportDef]
    module_of_device: dict[str, str]
    module_of_task: dict[str, str]

    @classmethod
    def of(cls, inst: ProblemInstance) -> "InstanceIndex":
        module_of_device: dict[str, str] = {}
        module_of_task: dict[str, str] = {}
        for m in inst.modules:
            for d in m.devices:
                module_of_device.setdefault(d, m.id)
            for p in m.tasks:
                module_of_task.setdefault(p, m.id)
        return cls(
            devices={d.id: d for d in inst.devices},
            tasks={t.id: t for t in inst.tasks},
            modules={m.id: m for m in inst.modules},
            transports={t.id: t for t in inst.dims.transports},
            module_of_device=module_of_device,
            module_of_task=module_of_task,
        )


from syssynth.catalog.parser import (  # noqa: E402
    dump_instance,
    load_instance,
    parse_instance,
    read_instance,
    write_instance,
)
from syssynth.catalog.validation import (  # noqa: E402
    InstanceViolation,
    ViolationCode,
    validate_instance,
)

__all__ = [
    "LOOPBACK",
    "UNBOUNDED",
    "Device",
    "Dimensions",
    "InputPort",
    "InstanceError",
    "InstanceIndex",
    "InstanceParseError",
    "InstanceViolation",
    "Mission",
    "Module",
    "OutputPort",
    "ProblemInstance",
    "ResourceDef",
    "ShapeError",
    "Task",
    "TransportDef",
    "UnknownReferenceError",
    "ViolationCode",
    "dump_instance",
    "load_instance",
    "parse_instance",
    "read_instance",
    "validate_instance",
    "value",
    "write_instance",
]
