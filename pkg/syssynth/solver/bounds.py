"""
Admissible lower bound on the objective of any completion of a partial
assignment.

SPDX-License-Identifier: EUPL-1.2
"""

from fractions import Fraction
from typing import Mapping

from syssynth.families import Family
from syssynth.model.program import Program, VarId
from syssynth.number import ZERO, common_denominator
from syssynth.solver.propagation import FREE


class Bounder:
    """
    Bound used by the search: the committed cost of the assignment plus the
    cheapest way to cover the largest unmet functional requirement. Costs are
    kept as integers scaled by `scale`.
    """

    def __init__(self, program: Program, index: Mapping[VarId, int]):
        self.scale = common_denominator(program.objective.values())
        self.costs = [0] * len(index)
        for v, c in program.objective.items():
            self.costs[index[v]] = int(c * self.scale)
        self.covers: list[tuple[tuple[tuple[int, Fraction], ...], Fraction]] = []
        for c in program.constraints:
            if c.tag != Family.MISSION:
                continue
            items = tuple((index[v], a) for v, a in c.expr.items() if a > 0)
            self.covers.append((items, c.rhs))

    def cost(self, values: list[int]) -> int:
        return sum(c for c, x in zip(self.costs, values) if x == 1)

    def unmet(self, values: list[int]) -> bool:
        for items, rhs in self.covers:
            if sum((a for i, a in items if values[i] == 1), ZERO) < rhs:
                return True
        return False

    def bound(self, values: list[int]) -> Fraction:
        committed = 0
        for c, x in zip(self.costs, values):
            if x == 1 or (x == FREE and c < 0):
                committed += c
        covering = ZERO
        for items, rhs in self.covers:
            residual = rhs - sum((a for i, a in items if values[i] == 1), ZERO)
            if residual <= 0:
                continue
            ratios = [
                Fraction(max(self.costs[i], 0)) / a
                for i, a in items
                if values[i] == FREE
            ]
            if not ratios:
                continue
            covering = max(covering, residual * min(ratios))
        return committed + covering


def lower_bound(program: Program, assignment: Mapping[VarId, int]) -> Fraction:
    """
    Lower bound on the objective of every feasible completion of a
    conflict-free partial assignment.
    """
    index = {v: i for i, v in enumerate(program.variables)}
    bounder = Bounder(program, index)
    values = [FREE] * len(index)
    for v, x in assignment.items():
        values[index[v]] = int(x)
    return bounder.bound(values) / bounder.scale
