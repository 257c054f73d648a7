"""
Export of programs to the LP and MPS exchange formats through pulp, so that
large instances can be handed to an external MILP solver.

SPDX-License-Identifier: EUPL-1.2
"""

import pathlib
import tempfile

import pulp

from syssynth.model.program import Program, Relation, VarId


def to_pulp(
    program: Program, name: str = "synthesis"
) -> tuple[pulp.LpProblem, dict[VarId, pulp.LpVariable]]:
    """
    Build the pulp model of a program. Rows are scaled to integer
    coefficients so that the exchange files carry them exactly.
    """
    problem = pulp.LpProblem(name, pulp.LpMinimize)
    xs = {
        v: pulp.LpVariable(program.name_of(v), cat=pulp.LpBinary)
        for v in program.variables
    }

    problem += (
        pulp.LpAffineExpression([(xs[v], float(c)) for v, c in program.objective.items()]),
        "objective",
    )
    for row in program.constraints:
        coefficients, rhs = row.scaled()
        expr = pulp.LpAffineExpression([(xs[v], c) for v, c in coefficients.items()])
        match row.relation:
            case Relation.LE:
                problem += (expr <= rhs, row.name)
            case Relation.GE:
                problem += (expr >= rhs, row.name)
            case _:
                problem += (expr == rhs, row.name)
    return problem, xs


def write_lp(path: pathlib.Path | str, program: Program) -> None:
    problem, _ = to_pulp(program)
    problem.writeLP(str(path))


def write_mps(
    path: pathlib.Path | str, program: Program, *, short_names: bool = False
) -> None:
    """
    Write a program as MPS. With `short_names` rows and columns are renamed to
    fit the fixed-column name width.
    """
    problem, _ = to_pulp(program)
    problem.writeMPS(str(path), rename=short_names)


def export_lp(program: Program) -> str:
    with tempfile.TemporaryDirectory() as tmp_dir:
        path = pathlib.Path(tmp_dir) / "program.lp"
        write_lp(path, program)
        return path.read_text(encoding="utf-8")


def export_mps(program: Program, *, short_names: bool = False) -> str:
    with tempfile.TemporaryDirectory() as tmp_dir:
        path = pathlib.Path(tmp_dir) / "program.mps"
        write_mps(path, program, short_names=short_names)
        return path.read_text(encoding="utf-8")
