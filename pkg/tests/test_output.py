"""Test the CSV tables and JSON documents written by the package."""

from __future__ import annotations

import json
import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

from galerkin_blowup.blowup import StepPlan, blowup_run
from galerkin_blowup.output import (
    BLOWUP_COLUMNS,
    blowup_table,
    blowup_to_dict,
    document_to_json,
    table_to_csv,
    trajectory_table,
    trajectory_to_dict,
)
from galerkin_blowup.problems import example_blowup, linear_test
from galerkin_blowup.stepping import solve_mesh, uniform_nodes

if TYPE_CHECKING:
    from pathlib import Path


def test_nodal_trajectory_table_has_errors() -> None:
    """Ensure the nodal table lists every node with exact values and errors.

    Returns:
        None: This test does not return a value.

    """

    problem = linear_test(-1.0)
    traj = solve_mesh(problem, uniform_nodes(1.0, 10), [1] * 10, "cg")
    table = trajectory_table(traj, problem)
    assert list(table.columns) == ["m", "t", "u_0", "exact_0", "error"]
    assert len(table) == 11
    assert table["m"].tolist() == list(range(11))
    assert table["error"].max() < 1e-6
    np.testing.assert_allclose(table["exact_0"], np.exp(-table["t"]))


def test_sampled_trajectory_table() -> None:
    """Ensure interior samples start at each left end and the final node closes the table.

    Returns:
        None: This test does not return a value.

    """

    problem = linear_test(0.5, dim=2)
    traj = solve_mesh(problem, [0.0, 0.2, 0.5], [2, 2], "dg")
    table = trajectory_table(traj, samples=4)
    assert list(table.columns) == ["m", "t", "u_0", "u_1"]
    assert len(table) == 9
    assert table["t"].iloc[0] == 0.0
    assert table["t"].iloc[4] == pytest.approx(0.2)
    assert table["t"].iloc[-1] == pytest.approx(0.5)
    np.testing.assert_allclose(table.iloc[4][["u_0", "u_1"]], traj.pieces[1].left_value)
    with pytest.raises(ValueError):
        trajectory_table(traj, samples=0)


def test_csv_is_deterministic(tmp_path: Path) -> None:
    """Ensure identical runs produce byte-identical files with 17 significant digits.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.

    Returns:
        None: This test does not return a value.

    """

    problem = linear_test(1.0)
    paths = [tmp_path / "first.csv", tmp_path / "second.csv"]
    for path in paths:
        traj = solve_mesh(problem, uniform_nodes(1.0, 10), [1] * 10, "cg")
        table_to_csv(trajectory_table(traj, problem), path)
    first, second = (path.read_bytes() for path in paths)
    assert first == second
    lines = first.decode("utf-8").splitlines()
    assert lines[0] == "m,t,u_0,exact_0,error"
    assert lines[2].startswith("1,0.10000000000000001,")
    assert b"\r" not in first


def test_blowup_table_and_document() -> None:
    """Check the per-step table and the JSON document of a short run.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    result = blowup_run(problem, problem.growth, StepPlan(rho=0.25), "cg", 0, tau=math.inf)
    table = blowup_table(result)
    assert list(table.columns) == list(BLOWUP_COLUMNS)
    assert len(table) == 2
    assert math.isnan(table["k_m"].iloc[0])
    assert math.isnan(table["norm"].iloc[1])
    assert table["norm"].iloc[0] == 3.0
    document = blowup_to_dict(result)
    assert document["stopped_by"] == "tolerance"
    assert document["steps"] == 1
    assert document["diagnostics"]["c0"] is None
    assert document["diagnostics"]["upper_bound_continuous"] == pytest.approx(2.0 / 3.0)
    text = document_to_json(document)
    assert json.loads(text)["t_infinity_estimate"] == pytest.approx(0.25 / 3.0)


def test_trajectory_document_round_trips_through_json(tmp_path: Path) -> None:
    """Ensure the trajectory document is valid JSON with one entry per interval.

    Args:
        tmp_path: Pytest fixture providing a temporary directory.

    Returns:
        None: This test does not return a value.

    """

    traj = solve_mesh(linear_test(1.0), [0.0, 0.1, 0.2], [0, 1], "dg")
    path = tmp_path / "traj.json"
    document_to_json(trajectory_to_dict(traj), path)
    loaded = json.loads(path.read_text(encoding="utf-8"))
    assert loaded["scheme"] == "dg"
    assert loaded["degrees"] == [0, 1]
    assert [piece["degree"] for piece in loaded["pieces"]] == [0, 1]
    assert all(piece["iterations"] >= 1 for piece in loaded["pieces"])


def test_json_rejects_non_finite_values() -> None:
    """Ensure NaN is never written silently.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(ValueError):
        document_to_json({"value": math.nan})
