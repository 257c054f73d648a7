import csv
from fractions import Fraction

from syssynth.expansion import expand
from syssynth.model import FlowMode
from syssynth.model.program import VarId
from syssynth.report import (
    RunRecord,
    SolutionDocument,
    hardware_dot,
    infeasibility_hints,
    instance_digest,
    read_solution,
    software_dot,
    write_run_records,
    write_time_table,
)
from syssynth.verify import check_solution, extract_system
from syssynth.verify.feasibility import Layout

from ._utils import candidates, instance, solved


def _record(trial: int, wall_time: float, **fields) -> RunRecord:
    return RunRecord(
        **{
            "instance": "chain",
            "digest": "abc",
            "trial": trial,
            "flow_mode": FlowMode.DIRECTED,
            "backend": "builtin",
            "time_limit": 10.0,
            "status": "OPTIMAL",
            "objective": 5.202,
            "wall_time": wall_time,
            "nodes": 3,
            "tool_version": "0.1.0",
            **fields,
        }
    )


def test_digest_tracks_the_content():
    inst = instance("chain")
    assert instance_digest(inst) == instance_digest(instance("chain"))
    changed = inst.copy(update={"weights": (1, 1, 2)})
    assert instance_digest(changed) != instance_digest(inst)


def test_solution_document(tmp_path):
    cands = candidates("chain")
    solution = solved(cands)
    document = SolutionDocument.of(solution, instance_digest(cands.instance), FlowMode.DIRECTED)
    assert document.objective == "2601/500"
    assert document.objective_value() == Fraction(2601, 500)

    path = tmp_path / "solution.json"
    path.write_text(document.json(indent=2))
    loaded = read_solution(path)
    assert loaded == document
    primary = loaded.primary_values(cands)
    assert set(primary) <= set(Layout.of(cands).columns)
    assert VarId.dev("d2") in primary
    assert all(primary[v] == solution.values[v] for v in primary)


def test_solution_document_keeps_merged_names_apart():
    cands = candidates("merged_names")
    solution = solved(cands)
    document = SolutionDocument.of(solution, instance_digest(cands.instance), FlowMode.DIRECTED)
    assert document.values["asg_pc_main_slam"] == 1
    assert document.values["asg_pc_main_slam_2"] == 1
    primary = document.primary_values(cands)
    assert primary[VarId.asg("pc", "main_slam")] == 1
    assert primary[VarId.asg("pc_main", "slam")] == 1
    assert check_solution(cands, primary).ok


def test_dot_output():
    cands = candidates("chain")
    system = extract_system(cands, solved(cands).values)
    hardware = hardware_dot(system)
    assert hardware.startswith("graph hardware {")
    assert '"d1" -- "d2" [label="eth"];' in hardware
    assert '"d2" -- "d2" [label="loopback"];' in hardware
    software = software_dot(system)
    assert software.startswith("digraph software {")
    assert '"src" [label="src\\n@d1"];' in software
    assert '"src" -> "snk" [label="out->in (m)"];' in software


def test_infeasibility_hints():
    assert infeasibility_hints(candidates("infeasible")) == ["q"]
    assert infeasibility_hints(candidates("chain")) == []


def test_context_gated_modules_give_no_capability():
    cands = candidates("context_gating")
    gps_only = cands.instance.copy(
        update={"modules": [cands.instance.modules[0]]}
    )
    assert infeasibility_hints(expand(gps_only)) == ["localization"]


def test_run_records(tmp_path):
    path = tmp_path / "runs.csv"
    write_run_records(path, [_record(0, 1.0), _record(1, 2.0), _record(2, 3.0)])
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 4
    assert [r["trial"] for r in rows] == ["0", "1", "2", "mean"]
    assert float(rows[-1]["wall_time"]) == 2.0
    assert len({r["objective"] for r in rows[:3]}) == 1


def test_failed_runs_are_left_out_of_the_mean(tmp_path):
    path = tmp_path / "runs.csv"
    records = [_record(0, 1.0), _record(1, 9.0, status="ERROR", error="boom")]
    write_run_records(path, records)
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert rows[1]["error"] == "boom"
    assert float(rows[-1]["wall_time"]) == 1.0


def test_time_table(tmp_path):
    path = tmp_path / "sweep.csv"
    write_time_table(
        path,
        {"q0": {"c0=0": 0.5, "c0=1": None}, "q0+q1": {"c0=0": 1.25, "c0=1": 2.0}},
        ["c0=0", "c0=1"],
    )
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows == [
        ["capabilities", "c0=0", "c0=1"],
        ["q0", "0.500000", ""],
        ["q0+q1", "1.250000", "2.000000"],
    ]
