"""
Generation and solving at the size of the shipped catalogs.
"""

import time

import pytest

from syssynth.catalog import read_instance
from syssynth.expansion import expand
from syssynth.gen import PRESETS, generate
from syssynth.model import FlowMode
from syssynth.model.export import export_lp
from syssynth.solver import SolverConfig, SolverStatus
from syssynth.verify import check_solution

from ._utils import CATALOGS, program_of, solved


@pytest.mark.long_running
@pytest.mark.parametrize("preset", sorted(PRESETS))
@pytest.mark.parametrize("flow_mode", list(FlowMode))
def test_generated_program_size(preset: str, flow_mode: FlowMode):
    started = time.perf_counter()
    cands = expand(generate(PRESETS[preset]))
    program = program_of(cands, flow_mode)
    assert time.perf_counter() - started < 5
    assert program.variables
    assert "Minimize" in export_lp(program)


@pytest.mark.long_running
def test_underwater_catalog_solves():
    cands = expand(read_instance(CATALOGS / "underwater_vehicle.json"))
    solution = solved(cands, config=SolverConfig(time_limit=300))
    assert solution.status.has_solution
    assert check_solution(cands, solution.values).ok


@pytest.mark.long_running
def test_search_rescue_preset_solves_within_budget():
    cands = expand(generate(PRESETS["search_rescue"]))
    solution = solved(cands, config=SolverConfig(time_limit=300))
    # generated requirements aren't guaranteed reachable, but the search must
    # either finish or leave an incumbent with a bound
    assert solution.status in (
        SolverStatus.OPTIMAL,
        SolverStatus.TIMEOUT_INCUMBENT,
        SolverStatus.INFEASIBLE,
    )
    if solution.status.has_solution:
        assert solution.lower_bound <= solution.objective
        assert check_solution(cands, solution.values).ok
    if solution.status == SolverStatus.OPTIMAL:
        assert solution.lower_bound == solution.objective
