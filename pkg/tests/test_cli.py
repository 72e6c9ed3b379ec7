import subprocess
import sys
from unittest import mock

import pytest

from uavmec import __version__
from uavmec.__main__ import main


def test_cli_version():
    cmd = [sys.executable, "-m", "uavmec", "--version"]
    assert subprocess.check_output(cmd).decode().strip() == __version__


def test_main_train(tiny_config_file, tmp_path):
    out_dir = tmp_path / "cli"
    args = ["train", "--config", str(tiny_config_file), "--out", str(out_dir)]
    assert main(args) == 0
    assert (out_dir / "checkpoint.npz").is_file()


def test_main_returns_2_on_a_bad_config(tmp_path, capsys):
    out_dir = tmp_path / "cli"
    args = ["train", "--config", str(tmp_path / "missing.csv"), "--out", str(out_dir)]
    assert main(args) == 2
    assert "uavmec train:" in capsys.readouterr().err
    assert not out_dir.exists()


def test_main_returns_2_on_a_missing_checkpoint(tiny_config_file, tmp_path):
    args = [
        "eval",
        "--config",
        str(tiny_config_file),
        "--checkpoint",
        str(tmp_path / "missing.npz"),
    ]
    assert main(args) == 2


@pytest.mark.parametrize("passed, status", [(True, 0), (False, 1)])
def test_main_validate_status(passed, status):
    with mock.patch("uavmec.harness.cmd_validate", return_value=passed) as validate:
        assert main(["validate", "--seed", "4"]) == status
    validate.assert_called_once_with(4)


def test_main_sweep_passes_its_arguments():
    schemes = ["--scheme", "proposed", "--scheme", "untreated"]
    with mock.patch("uavmec.harness.cmd_sweep") as sweep:
        main(["sweep", "--axis", "users"] + schemes)
    sweep.assert_called_once_with(None, "users", None, None, ["proposed", "untreated"])


def test_main_requires_a_checkpoint_for_eval():
    with pytest.raises(SystemExit):
        main(["eval"])
