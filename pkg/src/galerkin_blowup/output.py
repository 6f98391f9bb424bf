"""Serialise solver results to JSON documents and CSV tables.

Tables are built as :class:`pandas.DataFrame` objects with a fixed column
order and written with 17 significant digits, so identical runs produce
byte-identical files. JSON documents use plain lists and floats.

"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from .legendre import map_to_interval

if TYPE_CHECKING:
    from .blowup import BlowupResult
    from .problems import Problem
    from .stepping import Trajectory

FLOAT_FORMAT: str = "%.17g"
"""Float format of every CSV table."""

BLOWUP_COLUMNS: tuple[str, ...] = ("m", "t_m", "k_m", "norm")
"""Column order of the per-step blow-up table."""


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def trajectory_to_dict(traj: Trajectory) -> dict[str, Any]:
    """Return a JSON-ready description of ``traj``.

    Args:
        traj: Piecewise solution.

    Returns:
        dict[str, Any]: Nodes, degrees, scheme, initial value and one
        :meth:`PolyTraj.to_dict` entry per interval with its Picard count.

    """

    return {
        "scheme": traj.scheme,
        "nodes": [float(node) for node in traj.nodes],
        "degrees": list(traj.degrees),
        "initial_value": traj.initial_value.tolist(),
        "pieces": [{**piece.traj.to_dict(), "iterations": piece.iterations} for piece in traj.pieces],
    }


def trajectory_table(traj: Trajectory, problem: Problem | None = None, samples: int = 1) -> pd.DataFrame:
    """Return the trajectory sampled as a table.

    With ``samples == 1`` the rows are the nodal values ``U_m^-``. Otherwise
    each interval contributes ``samples`` equispaced points from its left end
    (where ``U_{m-1}^+`` is taken) and the final node closes the table.

    Args:
        traj: Piecewise solution.
        problem: Optional problem; its exact solution adds ``exact_i`` and
            ``error`` columns.
        samples: Points per interval.

    Returns:
        pandas.DataFrame: Columns ``m, t, u_0, ..., [exact_0, ..., error]``.

    Raises:
        ValueError: If ``samples`` is not positive.

    """

    if samples < 1:
        msg = f"Samples per interval must be positive, received {samples}"
        raise ValueError(msg)
    if samples == 1:
        indices = np.arange(len(traj.nodes))
        times = np.asarray(traj.nodes, dtype=float)
        values = traj.nodal_values()
    else:
        index_parts, time_parts, value_parts = [], [], []
        grid = np.linspace(-1.0, 1.0, samples + 1)[:-1]
        for index, piece in enumerate(traj.pieces):
            index_parts.append(np.full(samples, index))
            time_parts.append(np.asarray(map_to_interval(piece.traj.interval, grid)))
            value_parts.append(piece.traj.eval_reference(grid))
        index_parts.append(np.array([len(traj.pieces)]))
        time_parts.append(np.array([traj.nodes[-1]]))
        value_parts.append(traj.pieces[-1].right_value[None, :])
        indices = np.concatenate(index_parts)
        times = np.concatenate(time_parts)
        values = np.vstack(value_parts)

    table = pd.DataFrame({"m": indices, "t": times})
    for component in range(values.shape[1]):
        table[f"u_{component}"] = values[:, component]
    if problem is not None and problem.exact is not None:
        exact = np.asarray(problem.exact(times)).reshape(len(times), -1)
        for component in range(exact.shape[1]):
            table[f"exact_{component}"] = exact[:, component]
        table["error"] = np.linalg.norm(values - exact, axis=1)
    return table


def blowup_to_dict(result: BlowupResult) -> dict[str, Any]:
    """Return a JSON-ready description of a blow-up run.

    Non-finite bounds are stored as ``null``.

    """

    diagnostics = {key: _finite_or_none(value) for key, value in asdict(result.diagnostics).items()}
    return {
        "scheme": result.scheme,
        "degree": result.degree,
        "rho": result.rho,
        "mode": result.mode,
        "t_infinity_estimate": result.t_infinity_estimate,
        "steps": result.steps,
        "stopped_by": result.stopped_by,
        "abs_error": result.abs_error,
        "picard_iterations": result.picard_iterations,
        "geo_violations": result.geo_violations,
        "ball_violations": result.ball_violations,
        "diagnostics": diagnostics,
        "nodes": list(result.nodes),
        "step_sizes": list(result.step_sizes),
        "norms": [_finite_or_none(norm) for norm in result.norms],
    }


def blowup_table(result: BlowupResult) -> pd.DataFrame:
    """Return the per-step table ``m, t_m, k_m, ||U_m^-||``.

    Row ``m = 0`` holds the initial norm with an empty step size. A step that
    ended the run without being solved has an empty norm.

    """

    count = len(result.nodes)
    steps = [math.nan, *result.step_sizes]
    norms = list(result.norms) + [math.nan] * (count - len(result.norms))
    return pd.DataFrame(
        {"m": np.arange(count), "t_m": list(result.nodes), "k_m": steps, "norm": norms},
        columns=list(BLOWUP_COLUMNS),
    )


def table_to_csv(table: pd.DataFrame, path: str | Path | None = None) -> str:
    """Write ``table`` as CSV to ``path`` and return the text.

    Args:
        table: Table to serialise.
        path: Destination; ``None`` only returns the text.

    Returns:
        str: CSV text with ``%.17g`` floats.

    """

    text = table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def document_to_json(document: dict[str, Any], path: str | Path | None = None) -> str:
    """Write ``document`` as indented JSON to ``path`` and return the text."""

    text = json.dumps(document, indent=2, allow_nan=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
