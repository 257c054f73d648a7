"""
Expansion of a problem instance into its candidate structure: every device
connection the hardware graph may contain (one per transport and device pair,
plus a loopback per device) and every type-compatible task link the software
graph may contain.

SPDX-License-Identifier: EUPL-1.2
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from syssynth.catalog import LOOPBACK, InstanceIndex, ProblemInstance, value
from syssynth.number import ONE, ZERO, to_fraction

ResourceVector = Mapping[str, Fraction]


@dataclass(frozen=True, eq=False)
class CandidateConnection:
    index: int
    # in device document order; both entries are equal for a loopback
    endpoints: tuple[str, str]
    transport: str
    bandwidth: Fraction | None
    overhead: Fraction
    physical: bool
    # what each endpoint receives from the opposite one over this transport
    provides_to: Mapping[str, ResourceVector]
    is_loop: bool

    def touches(self, device: str) -> bool:
        return device in self.endpoints

    def other(self, device: str) -> str:
        a, b = self.endpoints
        return b if device == a else a

    @property
    def label(self) -> str:
        a, b = self.endpoints
        return f"{self.transport}:{a}-{b}"


@dataclass(frozen=True, eq=False)
class CandidateLink:
    index: int
    source: tuple[str, str]
    sink: tuple[str, str]
    msg_type: str
    nominal_rate: Fraction
    provides: ResourceVector

    @property
    def source_task(self) -> str:
        return self.source[0]

    @property
    def sink_task(self) -> str:
        return self.sink[0]

    def demand_on(self, cnx: CandidateConnection) -> Fraction:
        return self.nominal_rate * cnx.overhead

    @property
    def label(self) -> str:
        return f"{self.source[0]}.{self.source[1]}->{self.sink[0]}.{self.sink[1]}"


def _vector(mapping) -> dict[str, Fraction]:
    return {k: to_fraction(v) for k, v in mapping.items() if v != 0}


def expand_connections(inst: ProblemInstance) -> list[CandidateConnection]:
    """
    One candidate per transport and unordered device pair whose connection
    capacities on that transport are both positive, skipping forbidden pairs on
    physical transports, followed by one loopback per device. Loopbacks are
    unbounded, expose nothing and don't count against any capacity.
    """
    connections: list[CandidateConnection] = []
    for x in inst.dims.transports:
        for a, b in itertools.combinations(inst.devices, 2):
            if min(a.capacity(x.id), b.capacity(x.id)) <= 0:
                continue
            if x.physical and inst.mission.forbids(a.id, b.id):
                continue
            connections.append(
                CandidateConnection(
                    index=len(connections),
                    endpoints=(a.id, b.id),
                    transport=x.id,
                    bandwidth=x.bandwidth_value(),
                    overhead=to_fraction(x.overhead_factor),
                    physical=x.physical,
                    provides_to={
                        a.id: _vector(b.exposes.get(x.id, {})),
                        b.id: _vector(a.exposes.get(x.id, {})),
                    },
                    is_loop=False,
                )
            )
    for d in inst.devices:
        connections.append(
            CandidateConnection(
                index=len(connections),
                endpoints=(d.id, d.id),
                transport=LOOPBACK,
                bandwidth=None,
                overhead=ONE,
                physical=False,
                provides_to={d.id: {}},
                is_loop=True,
            )
        )
    return connections


def expand_links(inst: ProblemInstance) -> list[CandidateLink]:
    """
    One candidate per ordered (output, input) pair of distinct tasks whose
    message types agree, ordered by source task, output, sink task and input.
    """
    links: list[CandidateLink] = []
    for src in inst.tasks:
        for out in src.outputs:
            for snk in inst.tasks:
                if snk.id == src.id:
                    continue
                for inp in snk.inputs:
                    if inp.msg_type != out.msg_type:
                        continue
                    links.append(
                        CandidateLink(
                            index=len(links),
                            source=(src.id, out.id),
                            sink=(snk.id, inp.id),
                            msg_type=out.msg_type,
                            nominal_rate=to_fraction(out.nominal_rate),
                            provides=_vector(out.provides),
                        )
                    )
    return links


@dataclass(frozen=True, eq=False)
class Candidates:
    """
    The candidate structure of an instance together with the incidence maps
    program generation, checking and extraction share.
    """

    instance: ProblemInstance
    index: InstanceIndex
    connections: tuple[CandidateConnection, ...]
    links: tuple[CandidateLink, ...]
    # compatible (device, task) pairs, task-major in document order
    assignments: tuple[tuple[str, str], ...]
    incident: Mapping[str, tuple[int, ...]]
    loop_of: Mapping[str, int]
    links_into: Mapping[tuple[str, str], tuple[int, ...]]

    def devices_for(self, task: str) -> list[str]:
        return [d for d, p in self.assignments if p == task]

    def tasks_on(self, device: str) -> list[str]:
        return [p for d, p in self.assignments if d == device]

    def resource_basis(self, device: str, resource: str) -> Fraction:
        """
        Amount of `resource` a task on `device` is measured against: the
        device's own budget, or when it has none the largest amount any
        candidate connection can expose to it.
        """
        return _resource_basis(self.index, self.connections, device, resource)

    @property
    def routed_connections(self) -> list[CandidateConnection]:
        return [c for c in self.connections if not c.is_loop]


def _resource_basis(
    index: InstanceIndex,
    connections: tuple[CandidateConnection, ...] | list[CandidateConnection],
    device: str,
    resource: str,
) -> Fraction:
    own = value(index.devices[device].resources, resource)
    if own > 0:
        return own
    return max(
        (
            c.provides_to[device].get(resource, ZERO)
            for c in connections
            if c.touches(device) and not c.is_loop
        ),
        default=ZERO,
    )


def compatible(
    index: InstanceIndex,
    connections: tuple[CandidateConnection, ...] | list[CandidateConnection],
    device: str,
    task: str,
) -> bool:
    """
    A task can run on a device when the device is listed in the task's
    consumption and every resource it consumes is available there, either
    locally or through some incident connection.
    """
    consumption = index.tasks[task].consumption
    if device not in consumption:
        return False
    return all(
        _resource_basis(index, connections, device, w) > 0
        for w, c in consumption[device].items()
        if c > 0
    )


def expand(inst: ProblemInstance) -> Candidates:
    index = inst.index()
    connections = tuple(expand_connections(inst))
    links = tuple(expand_links(inst))

    assignments = tuple(
        (d.id, t.id)
        for t in inst.tasks
        for d in inst.devices
        if compatible(index, connections, d.id, t.id)
    )

    incident: dict[str, list[int]] = {d.id: [] for d in inst.devices}
    loop_of: dict[str, int] = {}
    for c in connections:
        if c.is_loop:
            loop_of[c.endpoints[0]] = c.index
            incident[c.endpoints[0]].append(c.index)
        else:
            for d in c.endpoints:
                incident[d].append(c.index)

    links_into: dict[tuple[str, str], list[int]] = {
        (t.id, i.id): [] for t in inst.tasks for i in t.inputs
    }
    for l in links:
        links_into[l.sink].append(l.index)

    return Candidates(
        instance=inst,
        index=index,
        connections=connections,
        links=links,
        assignments=assignments,
        incident={d: tuple(ks) for d, ks in incident.items()},
        loop_of=loop_of,
        links_into={p: tuple(ls) for p, ls in links_into.items()},
    )
