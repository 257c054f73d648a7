"""
Exhaustive oracle for tiny instances: enumerates every 0/1 vector over the
primary variables, keeps the ones passing the instance-level checks and
returns the exact minimum together with all minimizers. It shares nothing with
program generation or the solver apart from the cost formulas.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from syssynth.expansion import Candidates
from syssynth.model.objective import (
    DEFAULT_CONNECTION_COST,
    connection_cost,
    exec_cost,
    module_cost,
    route_cost,
)
from syssynth.model.program import VarId
from syssynth.number import ZERO
from syssynth.verify.feasibility import (
    Layout,
    feasible_rows,
    linear_checks,
    route_problem,
)

MAX_ORACLE_VARIABLES = 24
_CHUNK = 1 << 16


class OracleLimitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OracleResult:
    layout: Layout
    # `None` when no vector is feasible
    objective: Fraction | None
    optima: frozenset[tuple[int, ...]]

    def is_optimal(self, values: Mapping[VarId, int]) -> bool:
        """Whether a solution's primary variables form one of the optima."""
        return tuple(int(x) for x in self.layout.row(values)) in self.optima


def column_costs(
    cands: Candidates,
    layout: Layout,
    connection_epsilon: Fraction = DEFAULT_CONNECTION_COST,
) -> list[Fraction]:
    w1, w2, w3 = cands.instance.weight_values()
    costs = [ZERO] * len(layout)

    def charge(v: VarId, amount: Fraction):
        costs[layout.position[v]] += amount

    for m in cands.instance.modules:
        if m.size == 0:
            continue
        share = w1 * module_cost(cands, m) / m.size
        for d in m.devices:
            charge(VarId.dev(d), share)
        for p in m.tasks:
            for d in cands.devices_for(p):
                charge(VarId.asg(d, p), share)
    for d, p in cands.assignments:
        charge(VarId.asg(d, p), w2 * exec_cost(cands, d, p))
    for c in cands.connections:
        cost = connection_cost(c, connection_epsilon)
        charge(VarId.cnx(c.index, c.transport), w3 * cost)
    for l in cands.links:
        for c in cands.routed_connections:
            charge(VarId.rte(c.index, l.index), w3 * route_cost(c, l))
    return costs


def brute_force(
    cands: Candidates,
    connection_epsilon: Fraction = DEFAULT_CONNECTION_COST,
    max_variables: int = MAX_ORACLE_VARIABLES,
) -> OracleResult:
    layout = Layout.of(cands)
    n = len(layout)
    if n > max_variables:
        raise OracleLimitError(
            f"Instance has {n} structure variables,"
            f" the oracle handles at most {max_variables}"
        )
    checks = linear_checks(cands, layout)
    costs = column_costs(cands, layout, connection_epsilon)
    bits = np.arange(n, dtype=np.int64)

    best: Fraction | None = None
    optima: set[tuple[int, ...]] = set()
    for start in range(0, 1 << n, _CHUNK):
        ids = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        matrix = ((ids[:, None] >> bits) & 1).astype(np.int8)
        for row in matrix[feasible_rows(checks, matrix)]:
            if any(
                route_problem(cands, layout, row, l.index) is not None
                for l in cands.links
            ):
                continue
            cost = sum((c for c, x in zip(costs, row) if x), ZERO)
            vector = tuple(int(x) for x in row)
            if best is None or cost < best:
                best, optima = cost, {vector}
            elif cost == best:
                optima.add(vector)
    return OracleResult(layout=layout, objective=best, optima=frozenset(optima))
