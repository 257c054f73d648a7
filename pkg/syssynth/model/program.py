"""
Solver-agnostic representation of a 0/1 linear program: binary variables,
linear constraints tagged with the family they enforce, and a linear objective
to be minimized. All coefficients are exact rationals.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from syssynth._config import StrEnum
from syssynth._utils import sanitize_name
from syssynth.families import Family
from syssynth.number import ZERO, common_denominator, to_fraction


class ProgramError(ValueError):
    pass


class VarKind(StrEnum):
    DEV = "dev"
    ASG = "asg"
    CNX = "cnx"
    LNK = "lnk"
    RTE = "rte"
    ARC = "arc"
    # products of link and assignment activity, directed flow mode only
    GATE = "gte"
    DUMMY = "dmy"


# default branching priority
KIND_ORDER: tuple[VarKind, ...] = (
    VarKind.DEV,
    VarKind.ASG,
    VarKind.CNX,
    VarKind.LNK,
    VarKind.RTE,
    VarKind.ARC,
    VarKind.GATE,
    VarKind.DUMMY,
)

# variables the instance-level checks and the oracle reason about; the rest
# are determined by these
PRIMARY_KINDS: frozenset[VarKind] = frozenset(
    {VarKind.DEV, VarKind.ASG, VarKind.CNX, VarKind.LNK, VarKind.RTE}
)


class Direction(StrEnum):
    FWD = "fwd"
    BWD = "bwd"


class End(StrEnum):
    SRC = "src"
    SNK = "snk"


@dataclass(frozen=True, order=True)
class VarId:
    """
    Identity of a binary variable. Keys are:

    - DEV ``(device,)``
    - ASG ``(device, task)``
    - CNX ``(connection index, transport)``
    - LNK ``(link index,)``
    - RTE ``(connection index, link index)``
    - ARC ``(connection index, link index, direction)``
    - GATE/DUMMY ``(link index, device, end)``
    """

    kind: VarKind
    key: tuple

    @classmethod
    def dev(cls, device: str) -> "VarId":
        return cls(VarKind.DEV, (device,))

    @classmethod
    def asg(cls, device: str, task: str) -> "VarId":
        return cls(VarKind.ASG, (device, task))

    @classmethod
    def cnx(cls, k: int, transport: str) -> "VarId":
        return cls(VarKind.CNX, (k, transport))

    @classmethod
    def lnk(cls, l: int) -> "VarId":
        return cls(VarKind.LNK, (l,))

    @classmethod
    def rte(cls, k: int, l: int) -> "VarId":
        return cls(VarKind.RTE, (k, l))

    @classmethod
    def arc(cls, k: int, l: int, direction: Direction) -> "VarId":
        return cls(VarKind.ARC, (k, l, direction))

    @classmethod
    def gate(cls, l: int, device: str, end: End) -> "VarId":
        return cls(VarKind.GATE, (l, device, end))

    @classmethod
    def dummy(cls, l: int, device: str, end: End) -> "VarId":
        return cls(VarKind.DUMMY, (l, device, end))

    @property
    def name(self) -> str:
        """
        Exchange-format name, e.g. ``dev_pc1``, ``cnx_ethernet_0``,
        ``asg_pc1_slam``, ``rte_3_0`` or ``arc_3_0_fwd``.
        """
        match self.kind:
            case VarKind.CNX:
                k, x = self.key
                parts = [x, k]
            case _:
                parts = list(self.key)
        return sanitize_name("_".join([str(self.kind), *(str(p) for p in parts)]))

    def __str__(self) -> str:
        return self.name


def unique_names(variables: Iterable[VarId]) -> dict[VarId, str]:
    """
    Exchange-format names, unique even where sanitising merges identifiers
    (`asg_pc_main_slam` for both pc/main_slam and pc_main/slam). Among the
    variables sharing a name the first in key order keeps it, the others get
    the smallest free `_<n>` suffix from 2 on. The result depends only on the
    set of variables, not on their order.
    """
    groups: dict[str, set[VarId]] = {}
    for v in variables:
        groups.setdefault(v.name, set()).add(v)
    taken = set(groups)
    names: dict[VarId, str] = {}
    for name, group in sorted(groups.items()):
        first, *rest = sorted(group, key=lambda v: tuple(str(p) for p in v.key))
        names[first] = name
        n = 2
        for v in rest:
            while f"{name}_{n}" in taken:
                n += 1
            names[v] = f"{name}_{n}"
            taken.add(names[v])
    return names


class Relation(StrEnum):
    LE = "<="
    EQ = "="
    GE = ">="

    def holds(self, lhs: Fraction, rhs: Fraction) -> bool:
        match self:
            case Relation.LE:
                return lhs <= rhs
            case Relation.GE:
                return lhs >= rhs
            case _:
                return lhs == rhs


Expr = dict[VarId, Fraction]


def linear(terms: Iterable[tuple[VarId, Fraction | int]]) -> Expr:
    """Sum up terms per variable, dropping zero coefficients."""
    expr: Expr = {}
    for v, c in terms:
        expr[v] = expr.get(v, ZERO) + to_fraction(c)
    return {v: c for v, c in expr.items() if c != 0}


def evaluate(expr: Mapping[VarId, Fraction], values: Mapping[VarId, int]) -> Fraction:
    return sum((c for v, c in expr.items() if values.get(v, 0)), ZERO)


@dataclass(frozen=True, eq=False)
class Constraint:
    expr: Mapping[VarId, Fraction]
    relation: Relation
    rhs: Fraction
    tag: Family
    name: str = ""

    @classmethod
    def make(
        cls,
        terms: Iterable[tuple[VarId, Fraction | int]],
        relation: Relation,
        rhs: Fraction | int,
        tag: Family,
    ) -> "Constraint | None":
        """
        Build a row, or `None` when it has no variables and holds trivially.
        Empty rows that can't hold are kept so that infeasibility survives into
        the program.
        """
        expr = linear(terms)
        rhs = to_fraction(rhs)
        if not expr and relation.holds(ZERO, rhs):
            return None
        return cls(expr=expr, relation=relation, rhs=rhs, tag=tag)

    def scaled(self) -> tuple[dict[VarId, int], int]:
        """The row multiplied through to integer coefficients."""
        scale = common_denominator([*self.expr.values(), self.rhs])
        return (
            {v: int(c * scale) for v, c in self.expr.items()},
            int(self.rhs * scale),
        )

    def activity(self, values: Mapping[VarId, int]) -> Fraction:
        return evaluate(self.expr, values)

    def satisfied(self, values: Mapping[VarId, int]) -> bool:
        return self.relation.holds(self.activity(values), self.rhs)


@dataclass(frozen=True, eq=False)
class Program:
    variables: tuple[VarId, ...] = ()
    constraints: tuple[Constraint, ...] = ()
    objective: Mapping[VarId, Fraction] = field(default_factory=dict)
    sense: str = "minimize"
    # exchange-format names, see `unique_names`
    names: Mapping[VarId, str] = field(default_factory=dict)

    def name_of(self, v: VarId) -> str:
        return self.names.get(v, v.name)

    def evaluate(self, values: Mapping[VarId, int]) -> Fraction:
        return evaluate(self.objective, values)

    def tags(self) -> set[Family]:
        return {c.tag for c in self.constraints}

    def violated(self, values: Mapping[VarId, int]) -> list[Constraint]:
        return [c for c in self.constraints if not c.satisfied(values)]

    def count(self, kind: VarKind) -> int:
        return sum(1 for v in self.variables if v.kind == kind)
