"""
Constraint checks evaluated straight from instance data, vectorised over a
matrix whose rows are candidate solutions and whose columns are the primary
structure variables (devices, assignments, connections, links and routes).

Nothing here reads the generated program: every check is derived again from
the catalog, the mission and the candidate structure.

SPDX-License-Identifier: EUPL-1.2
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import networkx as nx
import numpy as np

from syssynth.catalog import value
from syssynth.expansion import Candidates
from syssynth.families import Family
from syssynth.model.program import Relation, VarId

TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Layout:
    """Column layout of the primary variables of a candidate structure."""

    columns: tuple[VarId, ...]
    position: Mapping[VarId, int]

    @classmethod
    def of(cls, cands: Candidates) -> "Layout":
        columns = [VarId.dev(d) for d in cands.index.devices]
        columns += [VarId.asg(d, p) for d, p in cands.assignments]
        columns += [VarId.cnx(c.index, c.transport) for c in cands.connections]
        columns += [VarId.lnk(l.index) for l in cands.links]
        columns += [
            VarId.rte(c.index, l.index)
            for l in cands.links
            for c in cands.routed_connections
        ]
        return cls(tuple(columns), {v: i for i, v in enumerate(columns)})

    def __len__(self) -> int:
        return len(self.columns)

    def row(self, values: Mapping[VarId, int]) -> np.ndarray:
        return np.array([values.get(v, 0) for v in self.columns], dtype=np.int8)


@dataclass(frozen=True, eq=False)
class LinearCheck:
    tag: Family
    elements: tuple[str, ...]
    detail: str
    columns: np.ndarray
    coefficients: np.ndarray
    relation: Relation
    rhs: float

    def violated(self, matrix: np.ndarray) -> np.ndarray:
        if len(self.columns) == 0:
            lhs = np.zeros(matrix.shape[0])
        else:
            lhs = matrix[:, self.columns].astype(np.float64) @ self.coefficients
        match self.relation:
            case Relation.LE:
                return lhs > self.rhs + TOLERANCE
            case Relation.GE:
                return lhs < self.rhs - TOLERANCE
            case _:
                return np.abs(lhs - self.rhs) > TOLERANCE


class _Checks:
    def __init__(self, layout: Layout):
        self.layout = layout
        self.checks: list[LinearCheck] = []

    def add(
        self,
        tag: Family,
        elements: Iterable[str],
        detail: str,
        terms: Iterable[tuple[VarId, Fraction | int]],
        relation: Relation,
        rhs: Fraction | int,
    ):
        merged: dict[int, float] = {}
        for v, c in terms:
            j = self.layout.position[v]
            merged[j] = merged.get(j, 0.0) + float(c)
        self.checks.append(
            LinearCheck(
                tag=tag,
                elements=tuple(elements),
                detail=detail,
                columns=np.array(list(merged), dtype=np.int64),
                coefficients=np.array(list(merged.values()), dtype=np.float64),
                relation=relation,
                rhs=float(rhs),
            )
        )


def _task_terms(cands: Candidates, task: str, scale: Fraction | int = 1):
    return [(VarId.asg(d, task), scale) for d in cands.devices_for(task)]


def _member_terms(cands: Candidates, module) -> list[list[tuple[VarId, int]]]:
    members = [[(VarId.dev(d), 1)] for d in module.devices]
    members += [_task_terms(cands, p) for p in module.tasks]
    return members


def linear_checks(cands: Candidates, layout: Layout) -> list[LinearCheck]:
    inst = cands.instance
    checks = _Checks(layout)

    for q, required in inst.mission.requirements.items():
        if required == 0:
            continue
        terms: list[tuple[VarId, Fraction]] = []
        for m in inst.modules:
            capability = value(m.capability, q)
            if capability == 0 or m.size == 0:
                continue
            for member in _member_terms(cands, m):
                terms += [(v, capability / m.size) for v, _ in member]
        checks.add(
            Family.MISSION,
            [q],
            f"requirement {q} not met",
            terms,
            Relation.GE,
            Fraction(required),
        )

    for m in inst.modules:
        if m.size == 0:
            continue
        members = _member_terms(cands, m)
        mean = [(v, Fraction(-1, m.size)) for member in members for v, _ in member]
        for d in m.devices:
            checks.add(
                Family.ATOMIC_MOD_DEVS,
                [m.id, d],
                f"device {d} disagrees with the rest of module {m.id}",
                [(VarId.dev(d), 1)] + mean,
                Relation.EQ,
                0,
            )
        for p in m.tasks:
            checks.add(
                Family.ATOMIC_MOD_TASK,
                [m.id, p],
                f"task {p} disagrees with the rest of module {m.id}",
                _task_terms(cands, p) + mean,
                Relation.EQ,
                0,
            )

    for t in inst.tasks:
        for j, needed in t.context_req.items():
            if needed == 0:
                continue
            checks.add(
                Family.CONTEXT,
                [t.id, j],
                f"task {t.id} needs context {j}",
                _task_terms(cands, t.id, Fraction(needed)),
                Relation.LE,
                value(inst.mission.context, j),
            )
        checks.add(
            Family.SELECT_TASK,
            [t.id],
            f"task {t.id} assigned more than once",
            _task_terms(cands, t.id),
            Relation.LE,
            1,
        )
        for d in cands.devices_for(t.id):
            checks.add(
                Family.ALL_ACTIVE,
                [t.id, d],
                f"task {t.id} runs on inactive device {d}",
                [(VarId.asg(d, t.id), 1), (VarId.dev(d), -1)],
                Relation.LE,
                0,
            )

    for dev in inst.devices:
        d = dev.id
        tasks = cands.tasks_on(d)
        for w in inst.dims.resource_ids():
            consumed = [
                (VarId.asg(d, p), value(cands.index.tasks[p].consumption[d], w))
                for p in tasks
            ]
            if not any(c for _, c in consumed):
                continue
            exposed = [
                (VarId.cnx(c.index, c.transport), -c.provides_to[d].get(w, 0))
                for c in (cands.connections[k] for k in cands.incident[d])
                if not c.is_loop
            ]
            checks.add(
                Family.FULL_BUDGET,
                [d, w],
                f"device {d} over its {w} budget",
                consumed + exposed,
                Relation.LE,
                value(dev.resources, w),
            )
        for x in inst.dims.transports:
            on_x = [
                (VarId.cnx(k, x.id), 1)
                for k in cands.incident[d]
                if cands.connections[k].transport == x.id
            ]
            if on_x:
                checks.add(
                    Family.CNX_CAPACITY,
                    [d, x.id],
                    f"device {d} over its {x.id} connection capacity",
                    on_x,
                    Relation.LE,
                    dev.capacity(x.id),
                )

    for c in cands.connections:
        cnx = VarId.cnx(c.index, c.transport)
        if c.is_loop:
            d = c.endpoints[0]
            checks.add(
                Family.ACTIVE_DEVICES,
                [c.label],
                f"loopback of {d} disagrees with the device",
                [(cnx, 1), (VarId.dev(d), -1)],
                Relation.EQ,
                0,
            )
            continue
        for d in c.endpoints:
            checks.add(
                Family.ACTIVE_DEVICES,
                [c.label, d],
                f"connection {c.label} touches inactive device {d}",
                [(cnx, 1), (VarId.dev(d), -1)],
                Relation.LE,
                0,
            )

    for t in inst.tasks:
        for port in t.inputs:
            feeding = [cands.links[l] for l in cands.links_into[(t.id, port.id)]]
            checks.add(
                Family.ALL_INPUTS,
                [f"{t.id}.{port.id}"],
                f"input {t.id}.{port.id} of an active task is not linked",
                _task_terms(cands, t.id) + [(VarId.lnk(l.index), -1) for l in feeding],
                Relation.LE,
                0,
            )
            for j, needed in port.requires.items():
                if needed == 0:
                    continue
                checks.add(
                    Family.LINK_SEMANTICS,
                    [f"{t.id}.{port.id}", j],
                    f"input {t.id}.{port.id} receives too little {j}",
                    [(VarId.lnk(l.index), l.provides.get(j, 0)) for l in feeding]
                    + _task_terms(cands, t.id, -Fraction(needed)),
                    Relation.GE,
                    0,
                )

    for l in cands.links:
        active = VarId.lnk(l.index)
        for task in (l.source_task, l.sink_task):
            checks.add(
                Family.ACTIVE_LINKS,
                [l.label, task],
                f"link {l.label} active while task {task} is not",
                [(active, 1)] + _task_terms(cands, task, -1),
                Relation.LE,
                0,
            )
        for c in cands.routed_connections:
            route = VarId.rte(c.index, l.index)
            checks.add(
                Family.ACTIVE_LINKS,
                [l.label, c.label],
                f"inactive link {l.label} routed over {c.label}",
                [(route, 1), (active, -1)],
                Relation.LE,
                0,
            )
            checks.add(
                Family.CONS_ROUTES,
                [l.label, c.label],
                f"link {l.label} routed over inactive connection {c.label}",
                [(route, 1), (VarId.cnx(c.index, c.transport), -1)],
                Relation.LE,
                0,
            )

    for c in cands.routed_connections:
        if c.bandwidth is None:
            continue
        checks.add(
            Family.BANDWIDTH,
            [c.label],
            f"connection {c.label} over its bandwidth",
            [(VarId.rte(c.index, l.index), l.demand_on(c)) for l in cands.links],
            Relation.LE,
            c.bandwidth,
        )

    return checks.checks


def feasible_rows(checks: list[LinearCheck], matrix: np.ndarray) -> np.ndarray:
    """Mask of the rows passing every linear check."""
    ok = np.ones(matrix.shape[0], dtype=bool)
    for check in checks:
        ok &= ~check.violated(matrix)
        if not ok.any():
            break
    return ok


def host(cands: Candidates, layout: Layout, row: np.ndarray, task: str) -> str | None:
    """The device a task is assigned to in a solution row, if any."""
    for d in cands.devices_for(task):
        if row[layout.position[VarId.asg(d, task)]]:
            return d
    return None


def routed(cands: Candidates, layout: Layout, row: np.ndarray, link: int) -> list[int]:
    return [
        c.index
        for c in cands.routed_connections
        if row[layout.position[VarId.rte(c.index, link)]]
    ]


def route_graph(cands: Candidates, connections: Iterable[int]) -> nx.MultiGraph:
    g = nx.MultiGraph()
    for k in connections:
        a, b = cands.connections[k].endpoints
        g.add_edge(a, b, key=k)
    return g


def route_problem(
    cands: Candidates, layout: Layout, row: np.ndarray, link: int
) -> str | None:
    """
    Why the routes of an active link don't form a simple path between the
    devices hosting its tasks, or `None` when they do. Links without an active
    host on both sides are left to the linear checks.
    """
    l = cands.links[link]
    if not row[layout.position[VarId.lnk(link)]]:
        return None
    src = host(cands, layout, row, l.source_task)
    snk = host(cands, layout, row, l.sink_task)
    if src is None or snk is None:
        return None
    g = route_graph(cands, routed(cands, layout, row, link))
    if src == snk:
        if g.number_of_edges():
            return f"co-located link {l.label} is routed over connections"
        return None
    if src not in g or snk not in g:
        return f"link {l.label} has no route from {src} to {snk}"
    if (
        not nx.is_connected(g)
        or g.number_of_edges() != g.number_of_nodes() - 1
        or any(deg > 2 for _, deg in g.degree())
        or g.degree(src) != 1
        or g.degree(snk) != 1
    ):
        return f"route of link {l.label} is not a simple path from {src} to {snk}"
    return None
