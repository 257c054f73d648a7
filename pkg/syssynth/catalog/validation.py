"""
Static validation of problem instances. Violations are collected and returned
in a stable order, never raised.

SPDX-License-Identifier: EUPL-1.2
"""

from collections import Counter
from typing import Iterable, Mapping

from syssynth._config import StrEnum, SynthModel
from syssynth.catalog import LOOPBACK, ProblemInstance


class ViolationCode(StrEnum):
    DUPLICATE_ID = "DUPLICATE_ID"
    UNKNOWN_REFERENCE = "UNKNOWN_REFERENCE"
    SHAPE_MISMATCH = "SHAPE_MISMATCH"
    RESERVED_TRANSPORT = "RESERVED_TRANSPORT"
    EMPTY_MODULE = "EMPTY_MODULE"
    MODULE_OVERLAP = "MODULE_OVERLAP"
    UNPARTITIONED_ELEMENT = "UNPARTITIONED_ELEMENT"


class InstanceViolation(SynthModel):
    code: ViolationCode
    element: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.code}({self.element}): {self.detail}"


def _duplicates(kind: str, ids: Iterable[str]) -> list[InstanceViolation]:
    counts = Counter(ids)
    return [
        InstanceViolation(
            code=ViolationCode.DUPLICATE_ID,
            element=i,
            detail=f"{kind} declared {n} times",
        )
        for i, n in counts.items()
        if n > 1
    ]


def _shape(
    owner: str, field: str, vector: Mapping, allowed: set[str]
) -> list[InstanceViolation]:
    return [
        InstanceViolation(
            code=ViolationCode.SHAPE_MISMATCH,
            element=owner,
            detail=f"{field} has undeclared dimension '{key}'",
        )
        for key in vector
        if key not in allowed
    ]


def _unknown(reference: str, detail: str) -> InstanceViolation:
    return InstanceViolation(
        code=ViolationCode.UNKNOWN_REFERENCE, element=reference, detail=detail
    )


def validate_instance(inst: ProblemInstance) -> list[InstanceViolation]:
    """
    Check the cross-element invariants of an instance: identifiers are unique,
    every reference resolves, every vector stays within its declared
    dimensions, and the modules partition the devices and tasks.
    """
    dims = inst.dims
    resources = set(dims.resource_ids())
    transports = set(dims.transport_ids())
    context = set(dims.context_dims)
    functions = set(dims.function_dims)
    msg_types = set(dims.message_types)
    semantics = set(dims.semantic_dims)
    devices = {d.id for d in inst.devices}
    tasks = {t.id for t in inst.tasks}

    violations: list[InstanceViolation] = []

    violations += _duplicates("resource", dims.resource_ids())
    violations += _duplicates("transport", dims.transport_ids())
    violations += _duplicates("context dimension", dims.context_dims)
    violations += _duplicates("function dimension", dims.function_dims)
    violations += _duplicates("message type", dims.message_types)
    violations += _duplicates("semantic dimension", dims.semantic_dims)
    violations += _duplicates("device", (d.id for d in inst.devices))
    violations += _duplicates("task", (t.id for t in inst.tasks))
    violations += _duplicates("module", (m.id for m in inst.modules))

    if LOOPBACK in transports:
        violations.append(
            InstanceViolation(
                code=ViolationCode.RESERVED_TRANSPORT,
                element=LOOPBACK,
                detail="transport identifier is reserved for device loopbacks",
            )
        )

    for d in inst.devices:
        violations += _shape(d.id, "resources", d.resources, resources)
        violations += _shape(d.id, "cnx_capacity", d.cnx_capacity, transports)
        violations += _shape(d.id, "exposes", d.exposes, transports)
        for x, exposed in d.exposes.items():
            violations += _shape(d.id, f"exposes.{x}", exposed, resources)

    for t in inst.tasks:
        for device_id, consumed in t.consumption.items():
            if device_id not in devices:
                violations.append(
                    _unknown(device_id, f"device in consumption of task '{t.id}'")
                )
            violations += _shape(t.id, f"consumption.{device_id}", consumed, resources)
        violations += _shape(t.id, "context_req", t.context_req, context)
        violations += _duplicates(
            f"port of task '{t.id}'",
            [p.id for p in t.inputs] + [p.id for p in t.outputs],
        )
        for port in [*t.inputs, *t.outputs]:
            if port.msg_type not in msg_types:
                violations.append(
                    _unknown(
                        port.msg_type, f"message type of port '{t.id}.{port.id}'"
                    )
                )
        for i in t.inputs:
            violations += _shape(t.id, f"{i.id}.requires", i.requires, semantics)
        for o in t.outputs:
            violations += _shape(t.id, f"{o.id}.provides", o.provides, semantics)

    device_owners: dict[str, list[str]] = {d.id: [] for d in inst.devices}
    task_owners: dict[str, list[str]] = {t.id: [] for t in inst.tasks}
    for m in inst.modules:
        if m.size == 0:
            violations.append(
                InstanceViolation(
                    code=ViolationCode.EMPTY_MODULE,
                    element=m.id,
                    detail="module has neither devices nor tasks",
                )
            )
        for d in m.devices:
            if d not in devices:
                violations.append(_unknown(d, f"device of module '{m.id}'"))
            else:
                device_owners[d].append(m.id)
        for p in m.tasks:
            if p not in tasks:
                violations.append(_unknown(p, f"task of module '{m.id}'"))
            else:
                task_owners[p].append(m.id)
        violations += _shape(m.id, "capability", m.capability, functions)

    for kind, owners in (("device", device_owners), ("task", task_owners)):
        for element, modules in owners.items():
            if len(modules) > 1:
                violations.append(
                    InstanceViolation(
                        code=ViolationCode.MODULE_OVERLAP,
                        element=element,
                        detail=f"{kind} is a member of modules {', '.join(modules)}",
                    )
                )
            elif not modules:
                violations.append(
                    InstanceViolation(
                        code=ViolationCode.UNPARTITIONED_ELEMENT,
                        element=element,
                        detail=f"{kind} belongs to no module",
                    )
                )

    mission = inst.mission
    violations += _shape("mission", "context", mission.context, context)
    violations += _shape("mission", "requirements", mission.requirements, functions)
    for pair in mission.cnx_forbidden:
        for d in pair:
            if d not in devices:
                violations.append(_unknown(d, "device in forbidden connection pair"))

    return violations
