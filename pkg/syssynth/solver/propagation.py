"""
Bound propagation over binary linear rows.

Every constraint is scaled to integer coefficients and brought into the form
``sum(a_i * x_i) <= b`` (equalities become two rows). For a partial assignment
the minimum activity of a row is the value of its fixed part plus all negative
coefficients of its free part. A row whose minimum activity exceeds its bound
is a conflict; a free variable whose unfavourable value would exceed the bound
is fixed to the other value.

SPDX-License-Identifier: EUPL-1.2
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from syssynth.model.program import Constraint, Program, Relation, VarId

FREE = -1


@dataclass(frozen=True)
class Row:
    items: tuple[tuple[int, int], ...]
    rhs: int
    # index of the program constraint the row comes from
    source: int


def _rows_of(c: Constraint, source: int, index: Mapping[VarId, int]) -> list[Row]:
    coefficients, rhs = c.scaled()
    items = tuple((index[v], a) for v, a in coefficients.items())
    rows = []
    if c.relation in (Relation.LE, Relation.EQ):
        rows.append(Row(items, rhs, source))
    if c.relation in (Relation.GE, Relation.EQ):
        rows.append(Row(tuple((i, -a) for i, a in items), -rhs, source))
    return rows


class Propagator:
    """
    Propagation engine shared by the search. Values live in a plain list with
    `FREE` for unassigned variables; every fixing is pushed onto the trail so
    that the search can undo it.
    """

    def __init__(self, program: Program):
        self.program = program
        self.index = {v: i for i, v in enumerate(program.variables)}
        self.rows: list[Row] = []
        for source, c in enumerate(program.constraints):
            self.rows += _rows_of(c, source, self.index)
        self.watch: list[list[int]] = [[] for _ in program.variables]
        for r, row in enumerate(self.rows):
            for i, _ in row.items:
                self.watch[i].append(r)
        self.propagations = 0

    def assign(self, values: list[int], trail: list[int], i: int, value: int):
        values[i] = value
        trail.append(i)

    def undo(self, values: list[int], trail: list[int], length: int):
        while len(trail) > length:
            values[trail.pop()] = FREE

    def _check(
        self, r: int, values: list[int], trail: list[int], queue: deque[int]
    ) -> bool:
        row = self.rows[r]
        min_activity = 0
        for i, a in row.items:
            x = values[i]
            if x == 1 or (x == FREE and a < 0):
                min_activity += a
        slack = row.rhs - min_activity
        if slack < 0:
            return False
        for i, a in row.items:
            if values[i] != FREE:
                continue
            # neither fixing changes the minimum activity of this row
            if a > slack:
                self.assign(values, trail, i, 0)
                queue.append(i)
                self.propagations += 1
            elif -a > slack:
                self.assign(values, trail, i, 1)
                queue.append(i)
                self.propagations += 1
        return True

    def _run(
        self, values: list[int], trail: list[int], queue: deque[int]
    ) -> int | None:
        while queue:
            i = queue.popleft()
            for r in self.watch[i]:
                if not self._check(r, values, trail, queue):
                    return self.rows[r].source
        return None

    def propagate_all(self, values: list[int], trail: list[int]) -> int | None:
        """
        Check every row once and propagate the consequences. Returns the index
        of a violated constraint, or `None`.
        """
        queue: deque[int] = deque()
        for r in range(len(self.rows)):
            if not self._check(r, values, trail, queue):
                return self.rows[r].source
        return self._run(values, trail, queue)

    def propagate_from(
        self, values: list[int], trail: list[int], changed: list[int]
    ) -> int | None:
        return self._run(values, trail, deque(changed))


@dataclass
class Propagation:
    fixings: dict[VarId, int] = field(default_factory=dict)
    conflict: Constraint | None = None

    @property
    def ok(self) -> bool:
        return self.conflict is None


def propagate(program: Program, assignment: Mapping[VarId, int]) -> Propagation:
    """
    Fix every value implied by a partial assignment, or report the constraint
    it violates.
    """
    engine = Propagator(program)
    values = [FREE] * len(program.variables)
    trail: list[int] = []
    for v, x in assignment.items():
        engine.assign(values, trail, engine.index[v], int(x))
    conflict = engine.propagate_all(values, trail)
    if conflict is not None:
        return Propagation(conflict=program.constraints[conflict])
    return Propagation(
        fixings={
            program.variables[i]: values[i]
            for i in range(len(values))
            if values[i] != FREE and program.variables[i] not in assignment
        }
    )
