"""
Documents written by the command line tool: solution and system JSON, DOT
renderings of the synthesized graphs and benchmark records.

SPDX-License-Identifier: EUPL-1.2
"""

import csv
import importlib.metadata
import pathlib
from fractions import Fraction
from statistics import mean
from typing import Iterable, Mapping

from syssynth._config import SynthModel
from syssynth._utils import canonical_json, sha256_digest
from syssynth.catalog import ProblemInstance, value
from syssynth.expansion import Candidates
from syssynth.model import FlowMode
from syssynth.model.program import VarId, unique_names
from syssynth.number import fraction_to_str, parse_fraction
from syssynth.solver import Solution, SolverStatus
from syssynth.verify.feasibility import Layout
from syssynth.verify.system import SynthesizedSystem


def tool_version() -> str:
    try:
        return importlib.metadata.version("syssynth")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def instance_digest(inst: ProblemInstance) -> str:
    """SHA-256 of the canonical JSON form of the instance."""
    return sha256_digest(canonical_json(inst.dict()))


def _fraction_or_none(v: Fraction | None) -> str | None:
    return None if v is None else fraction_to_str(v)


class SolutionDocument(SynthModel):
    """
    Solver result bound to an instance through its digest. Timings are left
    out so that deterministic runs produce identical documents.
    """

    instance_digest: str
    backend: str = "builtin"
    flow_mode: FlowMode = FlowMode.DIRECTED
    status: SolverStatus
    objective: str | None = None
    lower_bound: str | None = None
    nodes: int = 0
    propagations: int = 0
    values: dict[str, int] = {}

    @classmethod
    def of(
        cls, solution: Solution, digest: str, flow_mode: FlowMode
    ) -> "SolutionDocument":
        return cls(
            instance_digest=digest,
            backend=solution.backend,
            flow_mode=flow_mode,
            status=solution.status,
            objective=_fraction_or_none(solution.objective),
            lower_bound=_fraction_or_none(solution.lower_bound),
            nodes=solution.stats.nodes,
            propagations=solution.stats.propagations,
            values={
                name: solution.values[v]
                for v, name in unique_names(solution.values).items()
            },
        )

    def objective_value(self) -> Fraction | None:
        return None if self.objective is None else parse_fraction(self.objective)

    def primary_values(self, cands: Candidates) -> dict[VarId, int]:
        """Values of the structure variables; auxiliary ones are dropped."""
        names = unique_names(Layout.of(cands).columns)
        by_name = {name: v for v, name in names.items()}
        return {by_name[n]: x for n, x in self.values.items() if n in by_name}


def read_solution(path: pathlib.Path | str) -> SolutionDocument:
    return SolutionDocument.parse_file(path)


def system_document(
    system: SynthesizedSystem, cands: Candidates, digest: str
) -> dict:
    return {"instance_digest": digest, **system.to_document(cands)}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot_id(text: str) -> str:
    return f'"{_escape(text)}"'


def hardware_dot(system: SynthesizedSystem) -> str:
    """Undirected DOT graph of the selected devices and connections."""
    lines = ["graph hardware {"]
    for d in system.hardware.nodes:
        lines.append(f"    {_dot_id(d)};")
    for a, b, data in system.hardware.edges(data=True):
        lines.append(
            f"    {_dot_id(a)} -- {_dot_id(b)} [label={_dot_id(data['transport'])}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def software_dot(system: SynthesizedSystem) -> str:
    """Directed DOT graph of the active tasks and links."""
    lines = ["digraph software {"]
    for t, data in system.software.nodes(data=True):
        label = f'"{_escape(t)}\\n@{_escape(data["device"])}"'
        lines.append(f"    {_dot_id(t)} [label={label}];")
    for a, b, data in system.software.edges(data=True):
        label = f"{data['source_port']}->{data['sink_port']} ({data['msg_type']})"
        lines.append(f"    {_dot_id(a)} -> {_dot_id(b)} [label={_dot_id(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def infeasibility_hints(cands: Candidates) -> list[str]:
    """
    Functional dimensions whose requirement exceeds the total capability of
    the modules that can run in the mission context at all.
    """
    inst = cands.instance

    def usable(module) -> bool:
        for p in module.tasks:
            if not cands.devices_for(p):
                return False
            task = cands.index.tasks[p]
            if any(
                value(task.context_req, j) > value(inst.mission.context, j)
                for j in task.context_req
            ):
                return False
        return True

    usable_modules = [m for m in inst.modules if m.size and usable(m)]
    return [
        q
        for q, required in inst.mission.requirements.items()
        if sum((value(m.capability, q) for m in usable_modules), Fraction(0))
        < Fraction(required)
    ]


class RunRecord(SynthModel):
    instance: str
    digest: str
    trial: int
    flow_mode: FlowMode
    backend: str
    time_limit: float
    status: str
    objective: float | None = None
    wall_time: float = 0.0
    nodes: int = 0
    tool_version: str
    error: str = ""


RUN_FIELDS = list(RunRecord.__fields__)


def write_run_records(path: pathlib.Path | str, records: Iterable[RunRecord]) -> None:
    """
    CSV with one row per run followed by one row per instance holding the mean
    wall time of its successful runs.
    """
    records = list(records)
    by_instance: dict[str, list[float]] = {}
    for r in records:
        times = by_instance.setdefault(r.instance, [])
        if not r.error:
            times.append(r.wall_time)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RUN_FIELDS)
        writer.writeheader()
        for r in records:
            writer.writerow(r.dict())
        for instance, times in by_instance.items():
            writer.writerow(
                {
                    "instance": instance,
                    "trial": "mean",
                    "wall_time": mean(times) if times else "",
                }
            )


def write_time_table(
    path: pathlib.Path | str,
    table: Mapping[str, Mapping[str, float | None]],
    columns: list[str],
) -> None:
    """CSV of mean solution times, capability sets by row, contexts by column."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["capabilities", *columns])
        for row, cells in table.items():
            writer.writerow(
                [row, *("" if cells.get(c) is None else f"{cells[c]:.6f}" for c in columns)]
            )
