"""
Independent validation of solutions against the instance, the brute-force
oracle for tiny instances and the extraction of synthesized systems.

SPDX-License-Identifier: EUPL-1.2
"""

from typing import Mapping
from warnings import warn

from pydantic import root_validator

from syssynth._config import SynthModel
from syssynth.expansion import Candidates
from syssynth.families import Family
from syssynth.model.program import VarId
from syssynth.verify.feasibility import Layout, linear_checks, route_problem
from syssynth.verify.oracle import OracleLimitError, OracleResult, brute_force
from syssynth.verify.system import (
    SynthesizedSystem,
    drop_detached_routes,
    extract_system,
)


class Violation(SynthModel):
    tag: Family
    elements: list[str]
    detail: str = ""


class CheckReport(SynthModel):
    violations: list[Violation] = []
    ok: bool = True

    @root_validator(skip_on_failure=True)
    @classmethod
    def _ok_iff_clean(cls, values: dict) -> dict:
        values["ok"] = not values["violations"]
        return values

    def tags(self) -> set[Family]:
        return {v.tag for v in self.violations}


def check_solution(cands: Candidates, values: Mapping[VarId, int]) -> CheckReport:
    """
    Re-evaluate every constraint family of the synthesis problem from the
    instance data for one solution. Routes are checked for being simple paths
    between the hosts of each active link instead of through flow balances.
    Auxiliary variables of the program are ignored.
    """
    layout = Layout.of(cands)
    missing = [v for v in layout.columns if v not in values]
    if missing:
        warn(f"Solution has no value for {len(missing)} variables, taking them as 0")
    row = layout.row(values)
    matrix = row.reshape(1, -1)

    violations = [
        Violation(tag=c.tag, elements=list(c.elements), detail=c.detail)
        for c in linear_checks(cands, layout)
        if c.violated(matrix)[0]
    ]
    for l in cands.links:
        if (problem := route_problem(cands, layout, row, l.index)) is not None:
            violations.append(
                Violation(tag=Family.FLOW, elements=[l.label], detail=problem)
            )
    return CheckReport(violations=violations)


__all__ = [
    "CheckReport",
    "OracleLimitError",
    "OracleResult",
    "SynthesizedSystem",
    "Violation",
    "brute_force",
    "check_solution",
    "drop_detached_routes",
    "extract_system",
]
