import pytest_mock
from typer.testing import CliRunner

from syssynth.cli import cli


def test_version(mocker: pytest_mock.MockerFixture):
    mocker.patch("importlib.metadata.version", return_value="1.2.3")
    result = CliRunner().invoke(cli, ["version"])
    assert result.exit_code == 0
    assert "syssynth version: 1.2.3" in result.output
