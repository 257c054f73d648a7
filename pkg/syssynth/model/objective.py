"""
Cost functions of the synthesis objective and the objective expression built
from them.

The objective is the weighted sum of

- module cost: overhead plus device prices of every selected module,
- execution cost: the fraction of each used resource a task takes from the
  device it is assigned to,
- connection and routing cost: a small constant per selected connection and
  the share of a connection's bandwidth every routed link occupies.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from syssynth.catalog import Module
from syssynth.expansion import CandidateConnection, CandidateLink, Candidates
from syssynth.model.program import Expr, VarId, linear
from syssynth.number import ZERO, to_fraction

DEFAULT_CONNECTION_COST = Fraction(1, 1000)


def module_cost(cands: Candidates, module: Module) -> Fraction:
    devices = cands.index.devices
    return to_fraction(module.overhead_cost) + sum(
        (to_fraction(devices[d].cost) for d in module.devices), ZERO
    )


def exec_cost(cands: Candidates, device: str, task: str) -> Fraction:
    """
    Sum over consumed resources of consumption divided by what the device
    offers. Only defined for compatible pairs.
    """
    consumed = cands.index.tasks[task].consumption[device]
    total = ZERO
    for w, c in consumed.items():
        if c == 0:
            continue
        total += to_fraction(c) / cands.resource_basis(device, w)
    return total


def route_cost(cnx: CandidateConnection, link: CandidateLink) -> Fraction:
    # loops and unbounded transports are free to traverse
    if cnx.is_loop or cnx.bandwidth is None or cnx.bandwidth == 0:
        return ZERO
    return link.demand_on(cnx) / cnx.bandwidth


def connection_cost(cnx: CandidateConnection, epsilon: Fraction) -> Fraction:
    if cnx.is_loop:
        return ZERO
    return epsilon


def module_members(cands: Candidates, module: Module) -> list[VarId]:
    """Variables whose average is the activity of the module."""
    members = [VarId.dev(d) for d in module.devices]
    for p in module.tasks:
        members += [VarId.asg(d, p) for d in cands.devices_for(p)]
    return members


def objective_terms(
    cands: Candidates,
    connection_epsilon: Fraction = DEFAULT_CONNECTION_COST,
) -> Expr:
    w1, w2, w3 = cands.instance.weight_values()
    terms: list[tuple[VarId, Fraction]] = []
    for m in cands.instance.modules:
        if m.size == 0:
            continue
        share = w1 * module_cost(cands, m) / m.size
        terms += [(v, share) for v in module_members(cands, m)]
    for d, p in cands.assignments:
        terms.append((VarId.asg(d, p), w2 * exec_cost(cands, d, p)))
    for c in cands.connections:
        terms.append(
            (
                VarId.cnx(c.index, c.transport),
                w3 * connection_cost(c, connection_epsilon),
            )
        )
    for l in cands.links:
        for c in cands.routed_connections:
            terms.append((VarId.rte(c.index, l.index), w3 * route_cost(c, l)))
    return linear(terms)


@dataclass(frozen=True)
class ObjectiveBreakdown:
    module: Fraction
    execution: Fraction
    connection: Fraction
    routing: Fraction

    @property
    def total(self) -> Fraction:
        return self.module + self.execution + self.connection + self.routing


def objective_breakdown(
    cands: Candidates,
    values: Mapping[VarId, int],
    connection_epsilon: Fraction = DEFAULT_CONNECTION_COST,
) -> ObjectiveBreakdown:
    """
    Evaluate the weighted objective part by part from the primary variables of
    a solution. Module cost is charged pro rata to the active members, which is
    the full cost for every module of a feasible solution.
    """
    w1, w2, w3 = cands.instance.weight_values()

    module = ZERO
    for m in cands.instance.modules:
        if m.size == 0:
            continue
        active = sum(values.get(v, 0) for v in module_members(cands, m))
        module += module_cost(cands, m) * Fraction(active, m.size)

    execution = sum(
        (
            exec_cost(cands, d, p)
            for d, p in cands.assignments
            if values.get(VarId.asg(d, p), 0)
        ),
        ZERO,
    )
    connection = ZERO
    routing = ZERO
    for c in cands.connections:
        if values.get(VarId.cnx(c.index, c.transport), 0):
            connection += connection_cost(c, connection_epsilon)
    for l in cands.links:
        for c in cands.routed_connections:
            if values.get(VarId.rte(c.index, l.index), 0):
                routing += route_cost(c, l)
    return ObjectiveBreakdown(
        module=w1 * module,
        execution=w2 * execution,
        connection=w3 * connection,
        routing=w3 * routing,
    )
