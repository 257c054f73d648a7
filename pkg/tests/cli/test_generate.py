import json

from typer.testing import CliRunner

from syssynth.catalog import read_instance, validate_instance
from syssynth.cli import cli


def test_gen_shape(tmp_path):
    output = tmp_path / "tiny.json"
    result = CliRunner().invoke(
        cli, ["gen", "--seed", "7", "--shape", "4,6,3", "-o", str(output)]
    )
    assert result.exit_code == 0, result.output
    inst = read_instance(output)
    assert (len(inst.devices), len(inst.tasks), len(inst.modules)) == (4, 6, 3)
    assert validate_instance(inst) == []


def test_gen_is_reproducible(tmp_path):
    outputs = []
    for name in ("a.json", "b.json"):
        result = CliRunner().invoke(
            cli, ["gen", "--preset", "search_rescue", "--seed", "3", "-o", str(tmp_path / name)]
        )
        assert result.exit_code == 0, result.output
        outputs.append((tmp_path / name).read_bytes())
    assert outputs[0] == outputs[1]
    assert len(json.loads(outputs[0])["modules"]) == 29


def test_gen_from_spec(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"devices": 2, "tasks": 1, "modules": 1, "context_dims": 0}')
    output = tmp_path / "out.json"
    result = CliRunner().invoke(
        cli, ["gen", "--spec", str(spec), "--tightness", "0", "-o", str(output)]
    )
    assert result.exit_code == 0, result.output
    inst = read_instance(output)
    assert inst.dims.context_dims == []
    assert all(r == 0 for r in inst.mission.requirements.values())


def test_gen_invalid_shape(tmp_path):
    output = tmp_path / "out.json"
    result = CliRunner().invoke(cli, ["gen", "--shape", "1,1,5", "-o", str(output)])
    assert result.exit_code == 1
    assert not output.exists()
