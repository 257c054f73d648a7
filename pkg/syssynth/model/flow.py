"""
Flow conservation for link routing. Every active link sends one unit of flow
from the device hosting its source task to the device hosting its sink task
over directed arcs of the non-loop connections; co-located tasks need no flow.

Two encodings are offered. The directed one gates each endpoint assignment
with the link activity through a linearized product. The dummy one subtracts
the part of each assignment that belongs to an inactive link instead. Both
admit exactly the same routes.

SPDX-License-Identifier: EUPL-1.2
"""

from typing import Callable

from syssynth.expansion import CandidateLink, Candidates
from syssynth.families import Family
from syssynth.model.program import Constraint, Direction, End, Relation, VarId

FlowBlock = tuple[list[VarId], list[Constraint]]


def _rows(*rows: Constraint | None) -> list[Constraint]:
    return [r for r in rows if r is not None]


def _routing(link: CandidateLink, cands: Candidates) -> FlowBlock:
    """Arc variables and their tie to the route variable of each connection."""
    variables: list[VarId] = []
    rows: list[Constraint] = []
    for c in cands.routed_connections:
        route = VarId.rte(c.index, link.index)
        fwd = VarId.arc(c.index, link.index, Direction.FWD)
        bwd = VarId.arc(c.index, link.index, Direction.BWD)
        variables += [fwd, bwd]
        rows += _rows(
            Constraint.make(
                [(route, 1), (fwd, -1), (bwd, -1)], Relation.EQ, 0, Family.PLUMBING
            ),
            Constraint.make([(fwd, 1), (bwd, 1)], Relation.LE, 1, Family.PLUMBING),
        )
    return variables, rows


def _arc_balance(link: CandidateLink, cands: Candidates, device: str):
    """Out-minus-in arc terms of a device."""
    terms: list[tuple[VarId, int]] = []
    for k in cands.incident[device]:
        c = cands.connections[k]
        if c.is_loop:
            continue
        fwd = VarId.arc(k, link.index, Direction.FWD)
        bwd = VarId.arc(k, link.index, Direction.BWD)
        if c.endpoints[0] == device:
            terms += [(fwd, 1), (bwd, -1)]
        else:
            terms += [(bwd, 1), (fwd, -1)]
    return terms


def _endpoint_devices(link: CandidateLink, cands: Candidates, end: End) -> list[str]:
    task = link.source_task if end == End.SRC else link.sink_task
    return cands.devices_for(task)


def _task_of(link: CandidateLink, end: End) -> str:
    return link.source_task if end == End.SRC else link.sink_task


def flow_constraints_directed(link: CandidateLink, cands: Candidates) -> FlowBlock:
    """
    Per device: out-arcs minus in-arcs equals the gated source assignment
    minus the gated sink assignment, where the gate is the product of link
    activity and the assignment.
    """
    variables, rows = _routing(link, cands)
    active = VarId.lnk(link.index)

    gates: dict[tuple[str, End], VarId] = {}
    for end in (End.SRC, End.SNK):
        task = _task_of(link, end)
        for d in _endpoint_devices(link, cands, end):
            gate = VarId.gate(link.index, d, end)
            assigned = VarId.asg(d, task)
            gates[(d, end)] = gate
            variables.append(gate)
            rows += _rows(
                Constraint.make([(gate, 1), (active, -1)], Relation.LE, 0, Family.PLUMBING),
                Constraint.make([(gate, 1), (assigned, -1)], Relation.LE, 0, Family.PLUMBING),
                Constraint.make(
                    [(gate, 1), (active, -1), (assigned, -1)],
                    Relation.GE,
                    -1,
                    Family.PLUMBING,
                ),
            )

    for d in cands.index.devices:
        terms = _arc_balance(link, cands, d)
        if (src := gates.get((d, End.SRC))) is not None:
            terms.append((src, -1))
        if (snk := gates.get((d, End.SNK))) is not None:
            terms.append((snk, 1))
        rows += _rows(Constraint.make(terms, Relation.EQ, 0, Family.ACTIVE_FLOWS))
    return variables, rows


def flow_constraints_dummy(link: CandidateLink, cands: Candidates) -> FlowBlock:
    """
    Per device: out-arcs minus in-arcs minus the source assignment plus its
    dummy plus the sink assignment minus its dummy equals zero. A dummy takes
    the value of the assignment exactly when the link is inactive. Balance is
    kept per device over all arcs of the link, not per connection.
    """
    variables, rows = _routing(link, cands)
    active = VarId.lnk(link.index)

    balance: dict[str, list[tuple[VarId, int]]] = {
        d: _arc_balance(link, cands, d) for d in cands.index.devices
    }
    for end in (End.SRC, End.SNK):
        task = _task_of(link, end)
        sign = -1 if end == End.SRC else 1
        for d in _endpoint_devices(link, cands, end):
            dummy = VarId.dummy(link.index, d, end)
            assigned = VarId.asg(d, task)
            variables.append(dummy)
            rows += _rows(
                Constraint.make([(dummy, 1), (assigned, -1)], Relation.LE, 0, Family.PLUMBING),
                Constraint.make([(dummy, 1), (active, 1)], Relation.LE, 1, Family.PLUMBING),
                Constraint.make(
                    [(dummy, 1), (assigned, -1), (active, 1)],
                    Relation.GE,
                    0,
                    Family.PLUMBING,
                ),
            )
            balance[d] += [(assigned, sign), (dummy, -sign)]

    for d, terms in balance.items():
        rows += _rows(Constraint.make(terms, Relation.EQ, 0, Family.LINEAR_ACTIVE_FLOWS))
    return variables, rows


FlowEncoder = Callable[[CandidateLink, Candidates], FlowBlock]
