from fractions import Fraction

import pytest

from syssynth.catalog import ProblemInstance
from syssynth.expansion import expand
from syssynth.families import Family
from syssynth.model import Direction, FlowMode, VarId, VarKind
from syssynth.solver import solve
from syssynth.verify import (
    OracleLimitError,
    brute_force,
    check_solution,
    drop_detached_routes,
    extract_system,
)

from ._utils import candidates, program_of, solved


def _co_located() -> ProblemInstance:
    return ProblemInstance.parse_obj(
        {
            "dims": {
                "resources": ["cpu"],
                "function_dims": ["q"],
                "message_types": ["m"],
            },
            "devices": [{"id": "d", "resources": {"cpu": 4}, "cost": 1}],
            "tasks": [
                {
                    "id": "src",
                    "consumption": {"d": {"cpu": 1}},
                    "outputs": [{"id": "out", "msg_type": "m", "nominal_rate": 5}],
                },
                {
                    "id": "snk",
                    "consumption": {"d": {"cpu": 2}},
                    "inputs": [{"id": "in", "msg_type": "m"}],
                },
            ],
            "modules": [
                {
                    "id": "m",
                    "devices": ["d"],
                    "tasks": ["src", "snk"],
                    "capability": {"q": 1},
                }
            ],
            "mission": {"requirements": {"q": 1}},
        }
    )


@pytest.mark.parametrize(
    "name",
    ["two_devices", "competing", "context_gating", "dependency", "chain", "full_feature"],
)
def test_solver_output_passes_the_check(name):
    cands = candidates(name)
    solution = solved(cands)
    report = check_solution(cands, solution.values)
    assert report.ok, report.violations
    assert report.tags() == set()


def test_over_allocated_device():
    inst = ProblemInstance.parse_obj(
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
    cands = expand(inst)
    values = {
        VarId.dev("d"): 1,
        VarId.asg("d", "t1"): 1,
        VarId.asg("d", "t2"): 1,
        VarId.cnx(0, "loopback"): 1,
    }
    report = check_solution(cands, values)
    assert not report.ok
    assert report.tags() == {Family.FULL_BUDGET}
    assert report.violations[0].elements[0] == "d"


def test_route_over_inactive_connection():
    cands = candidates("chain")
    values = dict(solved(cands).values)
    values[VarId.cnx(1, "eth")] = 0
    report = check_solution(cands, values)
    assert Family.CONS_ROUTES in report.tags()


def test_broken_route():
    cands = candidates("chain")
    values = dict(solved(cands).values)
    values[VarId.rte(1, 0)] = 0
    report = check_solution(cands, values)
    assert Family.FLOW in report.tags()


def test_missing_values_are_taken_as_zero():
    cands = candidates("competing")
    with pytest.warns(UserWarning, match="no value"):
        report = check_solution(cands, {})
    assert report.tags() == {Family.MISSION}


def test_oracle_on_empty_mission():
    result = brute_force(candidates("minimal"))
    assert result.objective == 0
    assert (0, 0) in result.optima


def test_oracle_prefers_the_cheaper_module():
    cands = candidates("competing")
    result = brute_force(cands)
    assert result.objective == 5
    assert len(result.optima) == 1
    assert result.is_optimal(solved(cands).values)


def test_oracle_on_infeasible_requirement():
    result = brute_force(candidates("infeasible"))
    assert result.objective is None
    assert result.optima == frozenset()


def test_oracle_size_guard():
    with pytest.raises(OracleLimitError):
        brute_force(candidates("chain"), max_variables=3)


def test_dependency_is_resolved():
    cands = candidates("dependency")
    result = brute_force(cands)
    assert result.objective == Fraction(7601, 1000)
    a = result.layout.position[VarId.dev("a")]
    b = result.layout.position[VarId.dev("b")]
    assert all(v[a] == 1 and v[b] == 1 for v in result.optima)
    system = extract_system(cands, solved(cands).values)
    assert system.selected_modules == ["A", "B"]


def test_context_picks_the_indoor_module():
    cands = candidates("context_gating")
    system = extract_system(cands, solved(cands).values)
    assert system.selected_modules == ["lidar_2d"]
    assert system.objective.total == 6

    mission = cands.instance.mission
    outdoor = cands.instance.copy(
        update={"mission": mission.copy(update={"context": {"outdoor": 1}})}
    )
    outdoor_cands = expand(outdoor)
    system = extract_system(outdoor_cands, solved(outdoor_cands).values)
    assert system.selected_modules == ["gps"]
    assert system.objective.total == 2


def test_chain_route_is_in_path_order():
    cands = candidates("chain")
    system = extract_system(cands, solved(cands).values)
    assert system.routes == {0: [0, 1]}
    document = system.to_document(cands)
    assert document["routes"] == {"src.out->snk.in": ["eth:d1-d2", "eth:d2-d3"]}
    assert document["objective"]["total"] == "2601/500"
    assert system.bandwidth_margins == {0: Fraction(90), 1: Fraction(90)}


def test_co_located_link():
    cands = expand(_co_located())
    solution = solved(cands)
    system = extract_system(cands, solution.values)
    assert system.routes == {0: []}
    assert system.objective.routing == 0
    assert system.device_margins == {"d": {"cpu": Fraction(1)}}
    assert set(system.hardware.edges(keys=True)) == {("d", "d", 0)}
    assert list(system.software.edges()) == [("src", "snk")]


@pytest.mark.parametrize("flow_mode", list(FlowMode))
def test_detached_cycle_is_dropped(flow_mode: FlowMode):
    cands = candidates("circulation")
    program = program_of(cands, flow_mode)
    values = dict(solve(program).values)
    assert values[VarId.rte(0, 0)] == 1

    # b -> c -> d -> b next to the direct route a -> b
    for k, direction in ((3, Direction.FWD), (5, Direction.FWD), (4, Direction.BWD)):
        values[VarId.cnx(k, "eth")] = 1
        values[VarId.rte(k, 0)] = 1
        values[VarId.arc(k, 0, direction)] = 1
    assert all(c.satisfied(values) for c in program.constraints)
    assert Family.FLOW in check_solution(cands, values).tags()

    tidy = drop_detached_routes(cands, values)
    assert all(c.satisfied(tidy) for c in program.constraints)
    assert check_solution(cands, tidy).ok
    routes = [v for v, x in tidy.items() if x and v.kind == VarKind.RTE]
    assert routes == [VarId.rte(0, 0)]
    assert tidy[VarId.arc(0, 0, Direction.FWD)] == 1
    assert program.evaluate(tidy) < program.evaluate(values)
