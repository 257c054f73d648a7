"""
Extraction of the synthesized system from a solution: the hardware
pseudograph, the software multigraph, the task assignment, link routes in
path order and the remaining resource margins.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

import networkx as nx

from syssynth.catalog import value
from syssynth.expansion import Candidates
from syssynth.model.objective import (
    DEFAULT_CONNECTION_COST,
    ObjectiveBreakdown,
    objective_breakdown,
)
from syssynth.model.program import Direction, VarId
from syssynth.number import fraction_to_str
from syssynth.verify.feasibility import Layout, host, route_graph, routed


@dataclass(frozen=True, eq=False)
class SynthesizedSystem:
    hardware: nx.MultiGraph
    software: nx.MultiDiGraph
    assignment: dict[str, str]
    # link index to connection indices from the source host to the sink host
    routes: dict[int, list[int]]
    device_margins: dict[str, dict[str, Fraction]]
    # `None` for unbounded connections
    bandwidth_margins: dict[int, Fraction | None]
    selected_modules: list[str]
    objective: ObjectiveBreakdown

    def to_document(self, cands: Candidates) -> dict[str, Any]:
        """JSON-ready form keyed by element labels."""
        return {
            "selected_modules": list(self.selected_modules),
            "devices": list(self.hardware.nodes),
            "connections": [
                cands.connections[k].label for _, _, k in self.hardware.edges(keys=True)
            ],
            "tasks": list(self.software.nodes),
            "links": [cands.links[l].label for _, _, l in self.software.edges(keys=True)],
            "assignment": dict(self.assignment),
            "routes": {
                cands.links[l].label: [cands.connections[k].label for k in path]
                for l, path in self.routes.items()
            },
            "margins": {
                "devices": {
                    d: {w: fraction_to_str(m) for w, m in margins.items()}
                    for d, margins in self.device_margins.items()
                },
                "bandwidth": {
                    cands.connections[k].label: (
                        "unbounded" if m is None else fraction_to_str(m)
                    )
                    for k, m in self.bandwidth_margins.items()
                },
            },
            "objective": {
                "module": fraction_to_str(self.objective.module),
                "execution": fraction_to_str(self.objective.execution),
                "connection": fraction_to_str(self.objective.connection),
                "routing": fraction_to_str(self.objective.routing),
                "total": fraction_to_str(self.objective.total),
            },
        }


def _ordered_route(
    cands: Candidates, connections: list[int], src: str, snk: str
) -> list[int]:
    """Connections along the path from `src` to `snk`, dropping detached cycles."""
    if src == snk or not connections:
        return []
    g = route_graph(cands, connections)
    path = nx.shortest_path(g, src, snk)
    return [min(g[a][b]) for a, b in zip(path, path[1:])]


def drop_detached_routes(
    cands: Candidates, values: Mapping[VarId, int]
) -> dict[VarId, int]:
    """
    Solution values where every link is routed over exactly one path between
    its hosts. Flow balance alone admits circulations next to the path and on
    co-located or inactive links; these are zeroed together with their arcs,
    which keeps every constraint satisfied. Routes with no path at all are
    kept for `check_solution` to report.
    """
    layout = Layout.of(cands)
    row = layout.row(values)
    tidy = dict(values)
    for l in cands.links:
        src = host(cands, layout, row, l.source_task)
        snk = host(cands, layout, row, l.sink_task)
        path: list[int] = []
        if row[layout.position[VarId.lnk(l.index)]] and None not in (src, snk):
            try:
                connections = routed(cands, layout, row, l.index)
                path = _ordered_route(cands, connections, src, snk)
            except (nx.NodeNotFound, nx.NetworkXNoPath):
                continue
        for c in cands.routed_connections:
            tidy[VarId.rte(c.index, l.index)] = int(c.index in path)
            for direction in Direction:
                if (arc := VarId.arc(c.index, l.index, direction)) in tidy:
                    tidy[arc] = 0
        at = src
        for k in path:
            a, b = cands.connections[k].endpoints
            direction, at = (Direction.FWD, b) if at == a else (Direction.BWD, a)
            if (arc := VarId.arc(k, l.index, direction)) in tidy:
                tidy[arc] = 1
    return tidy


def extract_system(
    cands: Candidates,
    values: Mapping[VarId, int],
    connection_epsilon: Fraction = DEFAULT_CONNECTION_COST,
) -> SynthesizedSystem:
    inst = cands.instance
    layout = Layout.of(cands)
    row = layout.row(values)

    def on(v: VarId) -> bool:
        return bool(row[layout.position[v]])

    hardware = nx.MultiGraph()
    for d in cands.index.devices:
        if on(VarId.dev(d)):
            hardware.add_node(d)
    active_connections = [
        c for c in cands.connections if on(VarId.cnx(c.index, c.transport))
    ]
    for c in active_connections:
        a, b = c.endpoints
        hardware.add_edge(a, b, key=c.index, transport=c.transport, loop=c.is_loop)

    assignment: dict[str, str] = {}
    for t in inst.tasks:
        if (d := host(cands, layout, row, t.id)) is not None:
            assignment[t.id] = d

    software = nx.MultiDiGraph()
    for t in assignment:
        software.add_node(t, device=assignment[t])
    routes: dict[int, list[int]] = {}
    for l in cands.links:
        if not on(VarId.lnk(l.index)):
            continue
        software.add_edge(
            l.source_task,
            l.sink_task,
            key=l.index,
            source_port=l.source[1],
            sink_port=l.sink[1],
            msg_type=l.msg_type,
        )
        routes[l.index] = _ordered_route(
            cands,
            routed(cands, layout, row, l.index),
            assignment[l.source_task],
            assignment[l.sink_task],
        )

    device_margins: dict[str, dict[str, Fraction]] = {}
    for d in hardware.nodes:
        dev = cands.index.devices[d]
        margins: dict[str, Fraction] = {}
        for w in inst.dims.resource_ids():
            budget = value(dev.resources, w) + sum(
                (
                    c.provides_to[d].get(w, Fraction(0))
                    for c in active_connections
                    if c.touches(d) and not c.is_loop
                ),
                Fraction(0),
            )
            used = sum(
                (
                    value(cands.index.tasks[p].consumption[d], w)
                    for p, host_device in assignment.items()
                    if host_device == d
                ),
                Fraction(0),
            )
            if budget or used:
                margins[w] = budget - used
        device_margins[d] = margins

    bandwidth_margins: dict[int, Fraction | None] = {}
    for c in active_connections:
        if c.is_loop:
            continue
        if c.bandwidth is None:
            bandwidth_margins[c.index] = None
            continue
        bandwidth_margins[c.index] = c.bandwidth - sum(
            (
                l.demand_on(c)
                for l in cands.links
                if l.index in routes and c.index in routes[l.index]
            ),
            Fraction(0),
        )

    selected_modules = [
        m.id
        for m in inst.modules
        if m.size
        and all(on(VarId.dev(d)) for d in m.devices)
        and all(p in assignment for p in m.tasks)
    ]

    return SynthesizedSystem(
        hardware=hardware,
        software=software,
        assignment=assignment,
        routes=routes,
        device_margins=device_margins,
        bandwidth_margins=bandwidth_margins,
        selected_modules=selected_modules,
        objective=objective_breakdown(cands, values, connection_epsilon),
    )
