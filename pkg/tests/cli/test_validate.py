import json
import pathlib

import pytest
from typer.testing import CliRunner

from syssynth.cli import cli

INSTANCES = pathlib.Path("tests/instances")


def _solution_for(tmp_path: pathlib.Path, name: str) -> pathlib.Path:
    solution = tmp_path / f"{name}.solution.json"
    result = CliRunner().invoke(
        cli,
        [
            "synth",
            str(INSTANCES / f"{name}.json"),
            "-o",
            str(solution),
            "--system-output",
            str(tmp_path / f"{name}.system.json"),
        ],
    )
    assert result.exit_code == 0, result.output
    return solution


def _validate(name: str, solution: pathlib.Path):
    return CliRunner().invoke(
        cli, ["validate", str(INSTANCES / f"{name}.json"), str(solution)]
    )


def test_validate_ok(tmp_path):
    solution = _solution_for(tmp_path, "chain")
    result = _validate("chain", solution)
    assert result.exit_code == 0, result.output
    assert "satisfies every constraint" in result.output


def test_validate_tampered(tmp_path):
    solution = _solution_for(tmp_path, "two_devices")
    document = json.loads(solution.read_text())
    for name in document["values"]:
        if name.startswith("dev_"):
            document["values"][name] = 0
    solution.write_text(json.dumps(document))

    result = _validate("two_devices", solution)
    assert result.exit_code == 4
    assert "violations" in result.output


def test_validate_other_instance(tmp_path):
    solution = _solution_for(tmp_path, "competing")
    with pytest.warns(UserWarning, match="different instance"):
        result = _validate("two_devices", solution)
    # the values are checked anyway
    assert result.exit_code == 4


def test_validate_unreadable_solution(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    result = _validate("two_devices", broken)
    assert result.exit_code == 1
    assert "Could not parse" in result.output
