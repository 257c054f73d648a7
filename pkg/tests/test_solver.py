from fractions import Fraction

import pulp
import pytest

from syssynth.catalog import ProblemInstance, read_instance
from syssynth.expansion import expand
from syssynth.families import Family
from syssynth.model import FlowMode, Program, VarId
from syssynth.solver import (
    SolverConfig,
    SolverStatus,
    lower_bound,
    propagate,
    solve,
)
from syssynth.solver.external import solve_with_cbc
from syssynth.verify import check_solution

from ._utils import CATALOGS, candidates, program_of, solved


def _crowded_device() -> ProblemInstance:
    return ProblemInstance.parse_obj(
        {
            "dims": {"resources": ["cpu"]},
            "devices": [{"id": "d", "resources": {"cpu": 1}}],
            "tasks": [
                {"id": "t1", "consumption": {"d": {"cpu": 1}}},
                {"id": "t2", "consumption": {"d": {"cpu": 1}}},
            ],
            "modules": [{"id": "m", "devices": ["d"], "tasks": ["t1", "t2"]}],
        }
    )


def test_two_device_module():
    solution = solved(candidates("two_devices"))
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == Fraction(13, 2)
    assert solution.lower_bound == solution.objective
    assert set(solution.active(None)) >= {
        VarId.dev("d1"),
        VarId.dev("d2"),
        VarId.asg("d1", "p"),
    }
    assert solution.values[VarId.asg("d2", "p")] == 0


def test_unreachable_requirement():
    solution = solved(candidates("infeasible"))
    assert solution.status == SolverStatus.INFEASIBLE
    assert solution.objective is None
    assert not solution.status.has_solution


def test_empty_program():
    solution = solve(Program())
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == 0


def test_empty_mission_selects_nothing():
    solution = solved(candidates("minimal"))
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == 0
    assert solution.active() == []


def test_cheaper_module_wins():
    solution = solved(candidates("competing"))
    assert solution.objective == 5
    assert solution.values[VarId.dev("a")] == 1
    assert solution.values[VarId.dev("b")] == 0


def test_inactive_device_disables_its_assignments():
    program = program_of(candidates("two_devices"))
    result = propagate(program, {VarId.dev("d1"): 0})
    assert result.ok
    assert result.fixings[VarId.asg("d1", "p")] == 0


def test_active_task_activates_its_module():
    program = program_of(candidates("two_devices"))
    result = propagate(program, {VarId.asg("d1", "p"): 1})
    assert result.ok
    assert result.fixings[VarId.dev("d1")] == 1
    assert result.fixings[VarId.dev("d2")] == 1
    assert result.fixings[VarId.asg("d2", "p")] == 0


def test_exhausted_budget_is_a_conflict():
    program = program_of(expand(_crowded_device()))
    result = propagate(
        program, {VarId.asg("d", "t1"): 1, VarId.asg("d", "t2"): 1}
    )
    assert not result.ok
    assert result.conflict is not None
    assert result.conflict.tag == Family.FULL_BUDGET


def test_bound_of_complete_assignment_is_the_objective():
    program = program_of(candidates("two_devices"))
    solution = solve(program)
    assert lower_bound(program, solution.values) == Fraction(13, 2)


def test_bound_without_requirements_is_zero():
    assert lower_bound(program_of(candidates("minimal")), {}) == 0


def test_bound_covers_the_cheapest_module():
    program = program_of(candidates("competing"))
    bound = lower_bound(program, {})
    assert 5 <= bound <= solve(program).objective


def test_deterministic_runs_agree():
    cands = candidates("full_feature")
    first = solved(cands)
    second = solved(cands)
    assert first.status == SolverStatus.OPTIMAL
    assert first.values == second.values
    assert first.objective == second.objective == Fraction(7651, 1000)


@pytest.mark.parametrize("flow_mode", list(FlowMode))
def test_chain_is_routed_through_the_middle(flow_mode: FlowMode):
    cands = candidates("chain")
    solution = solved(cands, flow_mode)
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == Fraction(2601, 500)
    assert solution.values[VarId.rte(0, 0)] == 1
    assert solution.values[VarId.rte(1, 0)] == 1


def test_node_limit_stops_the_search():
    program = program_of(expand(read_instance(CATALOGS / "underwater_vehicle.json")))
    with pytest.warns(UserWarning, match="limit"):
        solution = solve(program, SolverConfig(node_limit=1))
    assert solution.status in (
        SolverStatus.TIMEOUT_INCUMBENT,
        SolverStatus.TIMEOUT_NONE,
    )
    assert solution.stats.nodes >= 1


def test_settings_from_environment(monkeypatch, mocker):
    mocker.patch("syssynth.solver.os.cpu_count", return_value=6)
    monkeypatch.setenv("SYNTH_TIME_LIMIT", "12.5")
    assert SolverConfig.from_env().jobs == 1

    monkeypatch.setenv("SYNTH_DETERMINISTIC", "0")
    config = SolverConfig.from_env(jobs=None, node_limit=50)
    assert config.time_limit == 12.5
    assert config.node_limit == 50
    assert config.jobs == 6
    assert not config.deterministic

    monkeypatch.setenv("SYNTH_JOBS", "2")
    assert SolverConfig.from_env().jobs == 2
    assert SolverConfig.from_env(jobs=3).jobs == 3


def test_parallel_search_finds_the_same_optimum():
    cands = candidates("dependency")
    config = SolverConfig(deterministic=False, jobs=2)
    solution = solved(cands, config=config)
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == Fraction(7601, 1000)


@pytest.mark.skipif(not pulp.PULP_CBC_CMD().available(), reason="no CBC binary")
def test_cbc_backend_agrees():
    program = program_of(candidates("dependency"))
    solution = solve_with_cbc(program, SolverConfig(time_limit=30))
    assert solution.backend == "cbc"
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == Fraction(7601, 1000)


@pytest.mark.skipif(not pulp.PULP_CBC_CMD().available(), reason="no CBC binary")
@pytest.mark.parametrize("name", ["chain", "circulation", "full_feature"])
def test_cbc_solutions_pass_the_check(name: str):
    cands = candidates(name)
    solution = solve_with_cbc(program_of(cands), SolverConfig(time_limit=30), cands)
    assert solution.status == SolverStatus.OPTIMAL
    assert solution.objective == solved(cands).objective
    assert check_solution(cands, solution.values).ok
