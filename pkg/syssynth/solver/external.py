"""
CBC back end through pulp, for instances beyond what the built-in search
handles comfortably.

SPDX-License-Identifier: EUPL-1.2
"""

import time
import warnings

import pulp

from syssynth.expansion import Candidates
from syssynth.model.export import to_pulp
from syssynth.model.program import Program
from syssynth.solver import Solution, SolverConfig, SolverStats, SolverStatus
from syssynth.verify.system import drop_detached_routes


def solve_with_cbc(
    program: Program,
    config: SolverConfig | None = None,
    cands: Candidates | None = None,
) -> Solution:
    """
    Hand the program to CBC. The objective of the returned vector is
    re-evaluated exactly; CBC doesn't report a usable bound, so one is only
    given for optimal results. With the candidates at hand, route circulations
    CBC may leave in are dropped from the vector.
    """
    config = config or SolverConfig()
    problem, xs = to_pulp(program)
    cbc = pulp.PULP_CBC_CMD(
        msg=False, timeLimit=config.time_limit, threads=config.jobs
    )
    started = time.perf_counter()
    problem.solve(cbc)
    stats = SolverStats(wall_time=time.perf_counter() - started)

    if problem.status == pulp.LpStatusInfeasible or (
        problem.sol_status == pulp.LpSolutionInfeasible
    ):
        return Solution(SolverStatus.INFEASIBLE, stats=stats, backend="cbc")
    if problem.sol_status not in (
        pulp.LpSolutionOptimal,
        pulp.LpSolutionIntegerFeasible,
    ):
        warnings.warn(f"CBC found no solution ({pulp.LpStatus[problem.status]})")
        return Solution(SolverStatus.TIMEOUT_NONE, stats=stats, backend="cbc")

    values = {v: int(round(x.varValue or 0)) for v, x in xs.items()}
    if cands is not None:
        values = drop_detached_routes(cands, values)
    objective = program.evaluate(values)
    if problem.sol_status == pulp.LpSolutionOptimal:
        return Solution(
            SolverStatus.OPTIMAL, values, objective, objective, stats, backend="cbc"
        )
    warnings.warn("CBC stopped at its time limit with a feasible solution")
    return Solution(
        SolverStatus.TIMEOUT_INCUMBENT, values, objective, None, stats, backend="cbc"
    )
