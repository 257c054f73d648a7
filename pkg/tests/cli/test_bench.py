import csv
import pathlib
import shutil

from typer.testing import CliRunner

from syssynth.cli import cli

INSTANCES = pathlib.Path("tests/instances")


def _rows(path: pathlib.Path) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def test_bench_directory(tmp_path):
    instances = tmp_path / "instances"
    instances.mkdir()
    for name in ("two_devices", "competing"):
        shutil.copy(INSTANCES / f"{name}.json", instances)
    output = tmp_path / "runs.csv"

    result = CliRunner().invoke(
        cli, ["bench", str(instances), "--trials", "3", "-o", str(output)]
    )
    assert result.exit_code == 0, result.output

    rows = _rows(output)
    assert len(rows) == 2 * 3 + 2
    runs = [r for r in rows if r["trial"] != "mean"]
    assert {r["instance"] for r in runs} == {"two_devices", "competing"}
    assert {r["status"] for r in runs} == {"OPTIMAL"}
    assert {float(r["objective"]) for r in runs if r["instance"] == "competing"} == {5.0}
    assert [r["instance"] for r in rows if r["trial"] == "mean"] == [
        "competing",
        "two_devices",
    ]


def test_bench_generator_spec(tmp_path):
    spec = tmp_path / "tiny_spec.json"
    spec.write_text('{"seed": 5, "devices": 2, "tasks": 2, "modules": 2}')
    output = tmp_path / "runs.csv"

    result = CliRunner().invoke(
        cli,
        ["bench", str(spec), "--count", "2", "--trials", "1", "-o", str(output)],
    )
    assert result.exit_code == 0, result.output
    runs = [r for r in _rows(output) if r["trial"] != "mean"]
    assert [r["instance"] for r in runs] == ["tiny_spec-5", "tiny_spec-6"]


def test_bench_empty_directory(tmp_path):
    result = CliRunner().invoke(cli, ["bench", str(tmp_path)])
    assert result.exit_code != 0
    assert "No instance documents" in result.output


def test_sweep(tmp_path):
    output = tmp_path / "sweep.csv"
    result = CliRunner().invoke(
        cli, ["sweep", str(INSTANCES / "context_gating.json"), "-o", str(output)]
    )
    assert result.exit_code == 0, result.output

    with open(output, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["capabilities", "outdoor=0", "outdoor=1"]
    assert [r[0] for r in rows[1:]] == ["localization"]
    assert all(cell for cell in rows[1][1:])
