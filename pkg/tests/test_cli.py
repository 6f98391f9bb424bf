"""Test the command-line interface wrapper.

The tests cover the three subcommands, artifact files, and the exit codes for
configuration errors and solver failures.

"""

from __future__ import annotations

import json
import math
from typing import TYPE_CHECKING

import pytest

from galerkin_blowup import cli

if TYPE_CHECKING:
    from pathlib import Path

    from pytest import CaptureFixture


def test_cli_solve_prints_nodal_table(capsys: CaptureFixture[str]) -> None:
    """Ensure ``solve`` prints eleven nodal rows and the error estimate.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main([
        "solve",
        "--problem",
        "linear",
        "--lam",
        "-1",
        "--scheme",
        "cg",
        "--degree",
        "1",
        "--horizon",
        "1",
        "--steps",
        "10",
    ])
    captured = capsys.readouterr()
    assert exit_code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "m,t,u_0,exact_0,error"
    rows = lines[1:12]
    assert len(rows) == 11
    assert all(float(row.split(",")[-1]) < 1e-6 for row in rows)
    assert lines[12].startswith("L-infinity error estimate: ")


def test_cli_solve_with_zero_rhs_keeps_initial_value(capsys: CaptureFixture[str]) -> None:
    """Ensure ``F = 0`` leaves every nodal value at ``u0``.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main(["solve", "--problem", "linear", "--lam", "0", "--u0", "2.5", "--nodes", "0,0.5,2"])
    captured = capsys.readouterr()
    assert exit_code == 0
    values = [float(line.split(",")[2]) for line in captured.out.splitlines()[1:4]]
    assert values == [2.5, 2.5, 2.5]


def test_cli_solve_writes_json(tmp_path: Path, capsys: CaptureFixture[str]) -> None:
    """Ensure ``--out`` with ``--format json`` writes the trajectory document.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    path = tmp_path / "traj.json"
    exit_code = cli.main([
        "solve",
        "--problem",
        "linear",
        "--lam",
        "1",
        "--scheme",
        "dg",
        "--horizon",
        "0.5",
        "--steps",
        "5",
        "--out",
        str(path),
        "--format",
        "json",
    ])
    capsys.readouterr()
    assert exit_code == 0
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["scheme"] == "dg"
    assert len(document["pieces"]) == 5


def test_cli_blowup_reports_estimate(tmp_path: Path, capsys: CaptureFixture[str]) -> None:
    """Ensure ``blowup`` prints the estimate and writes the per-step table.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    path = tmp_path / "steps.csv"
    exit_code = cli.main(["blowup", "--rho", "0.25", "--degree", "1", "--out", str(path)])
    captured = capsys.readouterr()
    assert exit_code == 0
    summary = dict(line.split(": ", 1) for line in captured.out.splitlines())
    assert summary["stopped_by"] == "saturation"
    assert abs(float(summary["T_estimate"]) - math.log(5.0 / 3.0)) == pytest.approx(float(summary["abs_error"]))
    assert float(summary["abs_error"]) < 0.05
    assert float(summary["upper_bound_continuous"]) == pytest.approx(2.0 / 3.0)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "m,t_m,k_m,norm"
    assert len(lines) == int(summary["steps"]) + 2


def test_cli_blowup_with_large_tau_takes_one_step(capsys: CaptureFixture[str]) -> None:
    """Ensure a threshold above the first step returns after one step.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main(["blowup", "--rho", "0.25", "--scheme", "dg", "--tau", "1"])
    captured = capsys.readouterr()
    assert exit_code == 0
    assert "steps: 1" in captured.out.splitlines()
    assert "stopped_by: tolerance" in captured.out.splitlines()


def test_cli_blowup_theoretical_mode_reports_bounds(capsys: CaptureFixture[str]) -> None:
    """Ensure the theoretical rule prints the discrete bound.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main(["blowup", "--rho", "0.1", "--mode", "theoretical", "--tau", "1e-3"])
    captured = capsys.readouterr()
    assert exit_code == 0
    assert "upper_bound_discrete: " in captured.out


def test_cli_rejects_inadmissible_rho(capsys: CaptureFixture[str]) -> None:
    """Ensure ``rho`` above the admissible bound exits with code 2.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(SystemExit) as exit_info:
        cli.main(["blowup", "--rho", "0.3", "--mode", "theoretical", "--rho0", "0.2"])
    assert exit_info.value.code == 2
    assert "admissible bound" in capsys.readouterr().err


def test_cli_rejects_initial_value_below_growth_threshold(capsys: CaptureFixture[str]) -> None:
    """Ensure ``||u0|| <= c_F`` on the benchmark exits with code 2.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(SystemExit) as exit_info:
        cli.main(["blowup", "--u0", "1.5", "--rho", "0.1"])
    assert exit_info.value.code == 2
    assert "c_F" in capsys.readouterr().err


def test_cli_blowup_with_initial_value_override(capsys: CaptureFixture[str]) -> None:
    """Ensure ``--u0`` on the benchmark moves the reference blow-up time.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main(["blowup", "--u0", "4", "--rho", "0.25", "--degree", "1"])
    captured = capsys.readouterr()
    assert exit_code == 0
    summary = dict(line.split(": ", 1) for line in captured.out.splitlines())
    assert abs(float(summary["T_estimate"]) - math.log(1.5)) == pytest.approx(float(summary["abs_error"]))
    assert float(summary["abs_error"]) < 0.05


def test_cli_rejects_malformed_config(tmp_path: Path) -> None:
    """Ensure an unknown configuration key exits with code 2.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.

    Returns:
        None: This test does not return a value.

    """

    path = tmp_path / "run.toml"
    path.write_text("[mesh]\nintervals = 4\n", encoding="utf-8")
    with pytest.raises(SystemExit) as exit_info:
        cli.main(["solve", "--config", str(path)])
    assert exit_info.value.code == 2


def test_cli_rejects_missing_mesh_and_command() -> None:
    """Ensure a solve without a mesh and a missing subcommand exit with code 2.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(SystemExit) as exit_info:
        cli.main(["solve", "--problem", "linear", "--lam", "1"])
    assert exit_info.value.code == 2
    with pytest.raises(SystemExit) as exit_info:
        cli.main([])
    assert exit_info.value.code == 2


def test_cli_reports_solver_failure(capsys: CaptureFixture[str]) -> None:
    """Ensure a step past the blow-up time exits with code 1 and names the interval.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main(["solve", "--scheme", "dg", "--nodes", "0,0.01,1", "--fp-max-iters", "50"])
    captured = capsys.readouterr()
    assert exit_code == 1
    assert "reduce the step size" in captured.err
    assert "interval 1" in captured.err


def test_cli_sweep_single_cell(capsys: CaptureFixture[str]) -> None:
    """Ensure a one-cell sweep prints one row and an undefined slope.

    Args:
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    exit_code = cli.main([
        "sweep",
        "--rho-list",
        "0.25",
        "--schemes",
        "cg",
        "--degrees",
        "0",
        "--jobs",
        "1",
    ])
    captured = capsys.readouterr()
    assert exit_code == 0
    lines = captured.out.splitlines()
    assert lines[0] == "rho,scheme,degree,steps,T_estimate,abs_error,status"
    assert len(lines) == 2
    assert lines[1].startswith("0.25,cg,0,")
    assert lines[1].endswith(",ok")
    assert "undefined" in captured.err


def test_cli_sweep_writes_file_and_summary(tmp_path: Path, capsys: CaptureFixture[str]) -> None:
    """Ensure the sweep table goes to ``--out`` and the slopes to standard output.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.
        capsys: Pytest fixture used to capture the CLI output.

    Returns:
        None: This test does not return a value.

    """

    path = tmp_path / "sweep.csv"
    exit_code = cli.main([
        "sweep",
        "--rho-list",
        "0.25,0.125",
        "--schemes",
        "cg",
        "--degrees",
        "0",
        "--jobs",
        "1",
        "--out",
        str(path),
    ])
    captured = capsys.readouterr()
    assert exit_code == 0
    assert len(path.read_text(encoding="utf-8").splitlines()) == 3
    assert "slope" in captured.out
    assert " ok" in captured.out
