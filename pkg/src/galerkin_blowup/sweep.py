"""Run blow-up time convergence studies over step parameters, schemes and degrees.

A study is a grid of independent :func:`galerkin_blowup.blowup.blowup_run`
calls, one per ``(rho, scheme, r)`` cell. Cells are plain picklable records
so they can run in a :class:`concurrent.futures.ProcessPoolExecutor`; every
worker rebuilds its problem from the registry. Results keep the order of the
cells, and failed cells stay in the table with status ``"failed"``.

"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .blowup import GrowthHypothesisError, StepPlan, blowup_run
from .problems import build_problem
from .stepping import NonConvergenceError, SolverConfig

logger = logging.getLogger(__name__)

SWEEP_COLUMNS: tuple[str, ...] = ("rho", "scheme", "degree", "steps", "T_estimate", "abs_error", "status")
"""Column order of the sweep table."""

SLOPE_COLUMNS: tuple[str, ...] = ("scheme", "degree", "slope", "points", "status")
"""Column order of the slope table."""


def default_rho_set() -> tuple[float, ...]:
    """Return the step parameters ``2^(-p/2)`` for ``p = 4, ..., 10``."""

    return tuple(2.0 ** (-p / 2.0) for p in range(4, 11))


@dataclass(frozen=True)
class SweepCell:
    """One blow-up run of a study.

    Attributes:
        problem: Registry name of the problem.
        problem_params: Factory parameters as sorted ``(name, value)`` pairs.
        clip: Optional clipping radius.
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        rho: Step parameter.
        mode: Step-size mode.
        rho_0: Reference parameter for theoretical mode.
        tau: Step threshold.
        fp_tolerance: Picard stopping tolerance.
        fp_max_iters: Picard iteration limit.
        quad_nodes: Gauss node count or ``"auto"``.

    """

    problem: str
    scheme: str
    degree: int
    rho: float
    problem_params: tuple[tuple[str, float], ...] = ()
    clip: float | None = None
    mode: str = "empirical"
    rho_0: float | None = None
    tau: float = 0.0
    fp_tolerance: float = 1e-12
    fp_max_iters: int = 200
    quad_nodes: int | str = "auto"


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one :class:`SweepCell`.

    Attributes:
        rho: Step parameter.
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        steps: Number of steps, ``None`` when the run failed.
        t_estimate: Computed blow-up time.
        abs_error: Distance to the exact blow-up time when known.
        status: ``"ok"`` or ``"failed"``.
        message: Error message of a failed run.

    """

    rho: float
    scheme: str
    degree: int
    steps: int | None
    t_estimate: float | None
    abs_error: float | None
    status: str = "ok"
    message: str = ""


@dataclass(frozen=True)
class SlopeEstimate:
    """Least-squares rate of ``log |error|`` against ``log rho``.

    Attributes:
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        slope: Fitted slope, ``None`` when undefined.
        points: Number of finite errors used.
        status: ``"ok"`` or ``"undefined"``.

    """

    scheme: str
    degree: int
    slope: float | None
    points: int
    status: str


def run_cell(cell: SweepCell) -> SweepRow:
    """Execute one blow-up run and report it as a table row.

    Solver failures and violated hypotheses are captured in the row.

    Args:
        cell: Task description.

    Returns:
        SweepRow: Outcome of the run.

    """

    problem = build_problem(cell.problem, clip=cell.clip, **dict(cell.problem_params))
    if problem.growth is None:
        msg = f"Problem {problem.name!r} has no growth constants"
        raise ValueError(msg)
    plan = StepPlan.for_scheme(cell.rho, cell.scheme, mode=cell.mode, rho_0=cell.rho_0)
    solver = SolverConfig(fp_tolerance=cell.fp_tolerance, fp_max_iters=cell.fp_max_iters, quad_nodes=cell.quad_nodes)
    try:
        result = blowup_run(problem, problem.growth, plan, cell.scheme, cell.degree, solver, tau=cell.tau)
    except (NonConvergenceError, GrowthHypothesisError) as error:
        logger.warning("%s r=%d rho=%g failed: %s", cell.scheme, cell.degree, cell.rho, error)
        return SweepRow(
            rho=cell.rho,
            scheme=cell.scheme,
            degree=cell.degree,
            steps=None,
            t_estimate=None,
            abs_error=None,
            status="failed",
            message=str(error),
        )
    return SweepRow(
        rho=cell.rho,
        scheme=cell.scheme,
        degree=cell.degree,
        steps=result.steps,
        t_estimate=result.t_infinity_estimate,
        abs_error=result.abs_error,
    )


def run_sweep(cells: Sequence[SweepCell], jobs: int | None = None) -> list[SweepRow]:
    """Run every cell, in parallel when ``jobs`` allows it.

    Args:
        cells: Task descriptions.
        jobs: Worker processes; ``None`` uses :func:`os.cpu_count` and ``1``
            runs inline.

    Returns:
        list[SweepRow]: Rows in the order of ``cells``.

    Raises:
        ValueError: If ``jobs`` is not positive.

    """

    if jobs is not None and jobs < 1:
        msg = f"jobs must be positive, received {jobs}"
        raise ValueError(msg)
    if not cells:
        return []
    workers = min(jobs or os.cpu_count() or 1, len(cells))
    logger.info("Running %d sweep cells on %d worker(s)", len(cells), workers)
    if workers == 1:
        return [run_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run_cell, cells))


def convergence_slopes(rows: Iterable[SweepRow]) -> list[SlopeEstimate]:
    """Fit ``log |error| = slope * log rho + c`` per ``(scheme, r)``.

    Args:
        rows: Sweep results.

    Returns:
        list[SlopeEstimate]: One estimate per ``(scheme, r)`` in first-seen
        order; ``slope`` is ``None`` with fewer than two finite, positive
        errors at distinct ``rho``.

    """

    groups: dict[tuple[str, int], list[tuple[float, float]]] = {}
    for row in rows:
        points = groups.setdefault((row.scheme, row.degree), [])
        error = row.abs_error
        if row.status == "ok" and error is not None and math.isfinite(error) and error > 0.0:
            points.append((row.rho, error))

    estimates = []
    for (scheme, degree), points in groups.items():
        if len({rho for rho, _ in points}) < 2:
            estimates.append(SlopeEstimate(scheme, degree, None, len(points), "undefined"))
            continue
        log_rho = np.log([rho for rho, _ in points])
        log_error = np.log([error for _, error in points])
        slope, _ = np.polyfit(log_rho, log_error, 1)
        estimates.append(SlopeEstimate(scheme, degree, float(slope), len(points), "ok"))
    return estimates


def sweep_table(rows: Iterable[SweepRow]) -> pd.DataFrame:
    """Return the rows as a table with the columns of :data:`SWEEP_COLUMNS`."""

    records = [
        (row.rho, row.scheme, row.degree, row.steps, row.t_estimate, row.abs_error, row.status) for row in rows
    ]
    table = pd.DataFrame.from_records(records, columns=list(SWEEP_COLUMNS))
    table["steps"] = table["steps"].astype("Int64")
    return table


def slopes_table(estimates: Iterable[SlopeEstimate]) -> pd.DataFrame:
    """Return slope estimates with the columns of :data:`SLOPE_COLUMNS`."""

    records = [(item.scheme, item.degree, item.slope, item.points, item.status) for item in estimates]
    return pd.DataFrame.from_records(records, columns=list(SLOPE_COLUMNS))


@dataclass(frozen=True)
class StudyResult:
    """Outcome of :meth:`ConvergenceStudy.run`.

    Attributes:
        rows: One row per cell.
        slopes: Convergence rates per ``(scheme, r)``.

    """

    rows: tuple[SweepRow, ...]
    slopes: tuple[SlopeEstimate, ...] = ()

    @property
    def failed(self) -> int:
        """Return the number of failed cells."""

        return sum(row.status == "failed" for row in self.rows)


class ConvergenceStudy:
    """Blow-up time convergence study over a ``rho x scheme x r`` grid.

    The study validates its grid on construction and builds the cells in
    ``(rho, scheme, r)`` order, so tables are deterministic regardless of the
    number of workers.

    """

    def __init__(
        self,
        problem: str = "example54",
        rhos: Sequence[float] | None = None,
        schemes: Sequence[str] = ("cg", "dg"),
        degrees: Sequence[int] = (0, 1),
        *,
        problem_params: dict[str, float] | None = None,
        clip: float | None = None,
        mode: str = "empirical",
        rho_0: float | None = None,
        tau: float = 0.0,
        solver: SolverConfig | None = None,
    ) -> None:
        """Initialise the study.

        Args:
            problem: Registry name of a problem with growth constants.
            rhos: Step parameters; defaults to :func:`default_rho_set`.
            schemes: Schemes to compare.
            degrees: Polynomial degrees to compare.
            problem_params: Factory parameters of the problem.
            clip: Optional clipping radius.
            mode: Step-size mode.
            rho_0: Reference parameter for theoretical mode.
            tau: Step threshold.
            solver: Picard settings shared by every cell.

        Returns:
            None: This constructor does not return a value.

        Raises:
            ValueError: If the grid is empty or contains invalid entries, or
                the problem has no growth constants.

        """

        self._rhos = tuple(float(rho) for rho in (default_rho_set() if rhos is None else rhos))
        self._schemes = tuple(schemes)
        self._degrees = tuple(int(degree) for degree in degrees)
        if not self._rhos or not self._schemes or not self._degrees:
            msg = "A study needs at least one rho, one scheme and one degree"
            raise ValueError(msg)
        if any(rho <= 0.0 for rho in self._rhos):
            msg = "Step parameters must be positive"
            raise ValueError(msg)
        params = {key: value for key, value in (problem_params or {}).items() if value is not None}
        if build_problem(problem, clip=clip, **params).growth is None:
            msg = f"Problem {problem!r} has no growth constants"
            raise ValueError(msg)
        solver = solver or SolverConfig()
        self._cells = tuple(
            SweepCell(
                problem=problem,
                scheme=scheme,
                degree=degree,
                rho=rho,
                problem_params=tuple(sorted(params.items())),
                clip=clip,
                mode=mode,
                rho_0=rho_0,
                tau=tau,
                fp_tolerance=solver.fp_tolerance,
                fp_max_iters=solver.fp_max_iters,
                quad_nodes=solver.quad_nodes,
            )
            for rho in self._rhos
            for scheme in self._schemes
            for degree in self._degrees
        )

    @property
    def cells(self) -> tuple[SweepCell, ...]:
        """Return the cells in ``(rho, scheme, r)`` order."""

        return self._cells

    def run(self, jobs: int | None = None) -> StudyResult:
        """Run every cell and fit the convergence rates.

        Args:
            jobs: Worker processes, see :func:`run_sweep`.

        Returns:
            StudyResult: Rows and slope estimates.

        """

        rows = run_sweep(self._cells, jobs)
        return StudyResult(rows=tuple(rows), slopes=tuple(convergence_slopes(rows)))
