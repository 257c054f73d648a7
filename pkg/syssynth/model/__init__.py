"""
Generation of the system synthesis program from an instance and its candidate
structure.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import replace
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

from pydantic import condecimal

from syssynth._config import StrEnum, SynthModel
from syssynth.catalog import value
from syssynth.expansion import Candidates
from syssynth.families import Family
from syssynth.model.flow import (
    FlowEncoder,
    flow_constraints_directed,
    flow_constraints_dummy,
)
from syssynth.model.objective import module_members, objective_terms
from syssynth.model.program import (
    KIND_ORDER,
    PRIMARY_KINDS,
    Constraint,
    Direction,
    End,
    Expr,
    Program,
    ProgramError,
    Relation,
    VarId,
    VarKind,
    unique_names,
)
from syssynth.number import to_fraction


class FlowMode(StrEnum):
    DIRECTED = "directed"
    DUMMY = "dummy"


class BuildOptions(SynthModel):
    flow_mode: FlowMode = FlowMode.DIRECTED
    # constant cost of every selected non-loop connection
    connection_cost: condecimal(ge=0) = Decimal("0.001")  # type: ignore[valid-type]

    @property
    def connection_epsilon(self) -> Fraction:
        return to_fraction(self.connection_cost)


_FLOW_ENCODERS: dict[FlowMode, FlowEncoder] = {
    FlowMode.DIRECTED: flow_constraints_directed,
    FlowMode.DUMMY: flow_constraints_dummy,
}


class _Rows:
    def __init__(self):
        self.rows: list[Constraint] = []

    def add(self, terms: Iterable[tuple[VarId, Fraction | int]], relation, rhs, tag):
        row = Constraint.make(terms, relation, rhs, tag)
        if row is not None:
            self.rows.append(row)

    def extend(self, rows: Iterable[Constraint]):
        self.rows.extend(rows)


def _structure_variables(cands: Candidates) -> list[VarId]:
    variables = [VarId.dev(d) for d in cands.index.devices]
    variables += [VarId.asg(d, p) for d, p in cands.assignments]
    variables += [VarId.cnx(c.index, c.transport) for c in cands.connections]
    variables += [VarId.lnk(l.index) for l in cands.links]
    variables += [
        VarId.rte(c.index, l.index)
        for l in cands.links
        for c in cands.routed_connections
    ]
    return variables


def _module_rows(cands: Candidates, rows: _Rows):
    inst = cands.instance
    for q, required in inst.mission.requirements.items():
        if required == 0:
            continue
        terms: list[tuple[VarId, Fraction]] = []
        for m in inst.modules:
            capability = value(m.capability, q)
            if capability == 0 or m.size == 0:
                continue
            terms += [(v, capability / m.size) for v in module_members(cands, m)]
        rows.add(terms, Relation.GE, to_fraction(required), Family.MISSION)

    for m in inst.modules:
        if m.size == 0:
            continue
        members = module_members(cands, m)
        average = [(v, Fraction(-1, m.size)) for v in members]
        for p in m.tasks:
            assigned = [(VarId.asg(d, p), 1) for d in cands.devices_for(p)]
            rows.add(assigned + average, Relation.EQ, 0, Family.ATOMIC_MOD_TASK)
        for d in m.devices:
            rows.add([(VarId.dev(d), 1)] + average, Relation.EQ, 0, Family.ATOMIC_MOD_DEVS)


def _task_rows(cands: Candidates, rows: _Rows):
    inst = cands.instance
    for t in inst.tasks:
        assigned = [(VarId.asg(d, t.id), 1) for d in cands.devices_for(t.id)]
        for j, needed in t.context_req.items():
            if needed == 0:
                continue
            rows.add(
                [(v, to_fraction(needed)) for v, _ in assigned],
                Relation.LE,
                value(inst.mission.context, j),
                Family.CONTEXT,
            )
        rows.add(assigned, Relation.LE, 1, Family.SELECT_TASK)
        for d in cands.devices_for(t.id):
            rows.add(
                [(VarId.asg(d, t.id), 1), (VarId.dev(d), -1)],
                Relation.LE,
                0,
                Family.ALL_ACTIVE,
            )


def _device_rows(cands: Candidates, rows: _Rows):
    inst = cands.instance
    for dev in inst.devices:
        d = dev.id
        tasks = cands.tasks_on(d)
        used = sorted(
            {
                w
                for p in tasks
                for w, c in cands.index.tasks[p].consumption[d].items()
                if c > 0
            },
            key=inst.dims.resource_ids().index,
        )
        for w in used:
            consumed = [
                (VarId.asg(d, p), value(cands.index.tasks[p].consumption[d], w))
                for p in tasks
            ]
            exposed = []
            for k in cands.incident[d]:
                c = cands.connections[k]
                if c.is_loop:
                    continue
                exposed.append((VarId.cnx(k, c.transport), -c.provides_to[d].get(w, 0)))
            rows.add(
                consumed + exposed,
                Relation.LE,
                value(dev.resources, w),
                Family.FULL_BUDGET,
            )

    for c in cands.connections:
        cnx = VarId.cnx(c.index, c.transport)
        if c.is_loop:
            device = VarId.dev(c.endpoints[0])
            rows.add([(cnx, 1), (device, -1)], Relation.LE, 0, Family.ACTIVE_DEVICES)
            rows.add([(device, 1), (cnx, -1)], Relation.LE, 0, Family.PLUMBING)
            continue
        for d in c.endpoints:
            rows.add([(cnx, 1), (VarId.dev(d), -1)], Relation.LE, 0, Family.ACTIVE_DEVICES)

    for dev in inst.devices:
        for x in inst.dims.transports:
            on_x = [
                (VarId.cnx(k, x.id), 1)
                for k in cands.incident[dev.id]
                if cands.connections[k].transport == x.id
            ]
            if on_x:
                rows.add(on_x, Relation.LE, dev.capacity(x.id), Family.CNX_CAPACITY)


def _link_rows(cands: Candidates, rows: _Rows):
    inst = cands.instance
    for t in inst.tasks:
        assigned = [(VarId.asg(d, t.id), 1) for d in cands.devices_for(t.id)]
        for port in t.inputs:
            feeding = [cands.links[l] for l in cands.links_into[(t.id, port.id)]]
            rows.add(
                assigned + [(VarId.lnk(l.index), -1) for l in feeding],
                Relation.LE,
                0,
                Family.ALL_INPUTS,
            )
            for j, needed in port.requires.items():
                if needed == 0:
                    continue
                rows.add(
                    [(VarId.lnk(l.index), l.provides.get(j, 0)) for l in feeding]
                    + [(v, -to_fraction(needed)) for v, _ in assigned],
                    Relation.GE,
                    0,
                    Family.LINK_SEMANTICS,
                )

    for l in cands.links:
        active = VarId.lnk(l.index)
        for task in (l.source_task, l.sink_task):
            rows.add(
                [(active, 1)] + [(VarId.asg(d, task), -1) for d in cands.devices_for(task)],
                Relation.LE,
                0,
                Family.ACTIVE_LINKS,
            )
        for c in cands.routed_connections:
            route = VarId.rte(c.index, l.index)
            rows.add([(route, 1), (active, -1)], Relation.LE, 0, Family.ACTIVE_LINKS)
            rows.add(
                [(route, 1), (VarId.cnx(c.index, c.transport), -1)],
                Relation.LE,
                0,
                Family.CONS_ROUTES,
            )

    for c in cands.routed_connections:
        if c.bandwidth is None:
            continue
        rows.add(
            [(VarId.rte(c.index, l.index), l.demand_on(c)) for l in cands.links],
            Relation.LE,
            c.bandwidth,
            Family.BANDWIDTH,
        )


def build_program(cands: Candidates, options: BuildOptions | None = None) -> Program:
    """
    Generate the full 0/1 program: structure, assignment, link and routing
    variables, every constraint family tagged with the rule it enforces, and
    the weighted objective.
    """
    options = options or BuildOptions()
    try:
        encoder = _FLOW_ENCODERS[FlowMode(options.flow_mode)]
    except (KeyError, ValueError) as e:
        raise ProgramError(f"Unsupported flow mode '{options.flow_mode}'") from e

    variables = _structure_variables(cands)
    rows = _Rows()
    _module_rows(cands, rows)
    _task_rows(cands, rows)
    _device_rows(cands, rows)
    _link_rows(cands, rows)

    auxiliary: list[VarId] = []
    for l in cands.links:
        arcs_and_products, flow_rows = encoder(l, cands)
        auxiliary += arcs_and_products
        rows.extend(flow_rows)
    variables += [v for v in auxiliary if v.kind == VarKind.ARC]
    variables += [v for v in auxiliary if v.kind != VarKind.ARC]

    constraints = tuple(
        replace(row, name=f"{row.tag}_{i}")
        for i, row in enumerate(rows.rows)
    )
    return Program(
        variables=tuple(variables),
        constraints=constraints,
        objective=objective_terms(cands, options.connection_epsilon),
        names=unique_names(variables),
    )


__all__ = [
    "KIND_ORDER",
    "PRIMARY_KINDS",
    "BuildOptions",
    "Constraint",
    "Direction",
    "End",
    "Expr",
    "FlowMode",
    "Program",
    "ProgramError",
    "Relation",
    "VarId",
    "VarKind",
    "build_program",
    "flow_constraints_directed",
    "flow_constraints_dummy",
    "objective_terms",
    "unique_names",
]
