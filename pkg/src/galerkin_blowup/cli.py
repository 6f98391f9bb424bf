"""Provide the command-line interface for the Galerkin blow-up package.

Three subcommands are available: ``solve`` marches the cG or dG scheme over a
mesh, ``blowup`` estimates the blow-up time with norm-adapted steps, and
``sweep`` runs the convergence study over several step parameters. Settings
come from an optional TOML file (``--config``) overridden by flags. This module
is registered as the entry point ``galerkin-blowup`` in :mod:`pyproject.toml`.

Exit codes: ``0`` on success, ``1`` when a step solver fails to converge, and
``2`` for configuration errors.

"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from typing import Callable

from .blowup import StepPlan, blowup_run
from .config import (
    RunConfig,
    build_configured_problem,
    build_run_config,
    problem_params,
    resolved_rho0,
    solver_config,
    validate,
)
from .output import (
    blowup_table,
    blowup_to_dict,
    document_to_json,
    table_to_csv,
    trajectory_table,
    trajectory_to_dict,
)
from .problems import PROBLEMS, Problem
from .stepping import SCHEMES, NonConvergenceError, solve_mesh, uniform_nodes
from .sweep import ConvergenceStudy, slopes_table, sweep_table

OVERRIDE_FIELDS: tuple[str, ...] = (
    "problem",
    "lam",
    "u0",
    "alpha",
    "beta",
    "dim",
    "clip",
    "scheme",
    "degree",
    "horizon",
    "steps",
    "nodes",
    "samples",
    "fp_tolerance",
    "fp_max_iters",
    "quad_nodes",
    "mode",
    "rho",
    "rho_list",
    "tau",
    "rho0",
    "schemes",
    "degrees",
    "jobs",
    "out",
    "format",
)
"""Parsed arguments that override :class:`RunConfig` fields."""


def _float_list(text: str) -> tuple[float, ...]:
    """Parse a comma-separated list of floats.

    Args:
        text: Raw argument, e.g. ``"0,0.1,0.3"``.

    Returns:
        tuple[float, ...]: Parsed values; empty items are skipped.

    Raises:
        argparse.ArgumentTypeError: If an item is not a number.

    """

    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as error:
        msg = f"Expected comma-separated numbers, received {text!r}"
        raise argparse.ArgumentTypeError(msg) from error


def _int_list(text: str) -> tuple[int, ...]:
    """Parse a comma-separated list of integers.

    Args:
        text: Raw argument, e.g. ``"0,1"``.

    Returns:
        tuple[int, ...]: Parsed values; empty items are skipped.

    Raises:
        argparse.ArgumentTypeError: If an item is not an integer.

    """

    try:
        return tuple(int(item) for item in text.split(",") if item.strip())
    except ValueError as error:
        msg = f"Expected comma-separated integers, received {text!r}"
        raise argparse.ArgumentTypeError(msg) from error


def _str_list(text: str) -> tuple[str, ...]:
    """Split a comma-separated list of names.

    Args:
        text: Raw argument, e.g. ``"cg,dg"``.

    Returns:
        tuple[str, ...]: Stripped, non-empty items.

    """

    return tuple(item.strip() for item in text.split(",") if item.strip())


def _quad_nodes(text: str) -> int | str:
    """Parse the quadrature node count.

    Args:
        text: ``"auto"`` or an integer.

    Returns:
        int | str: The integer count or ``"auto"``.

    Raises:
        argparse.ArgumentTypeError: If ``text`` is neither.

    """

    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError as error:
        msg = f"Expected 'auto' or an integer, received {text!r}"
        raise argparse.ArgumentTypeError(msg) from error


def _shared_parser() -> argparse.ArgumentParser:
    """Return the parent parser with the flags every subcommand accepts.

    Returns:
        argparse.ArgumentParser: Parser without its own help option.

    """

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", type=str, default=None, help="TOML run configuration.")
    shared.add_argument(
        "--problem",
        type=str,
        default=None,
        help=f"Problem name, one of {', '.join(sorted(PROBLEMS))} (default example54).",
    )
    shared.add_argument("--lam", type=float, default=None, help="Rate of the linear problem.")
    shared.add_argument(
        "--u0",
        type=float,
        default=None,
        help="Initial value of scalar problems; example54 needs |u0| > 2 for blowup.",
    )
    shared.add_argument("--alpha", type=float, default=None, help="Growth constant of the powerlaw problem.")
    shared.add_argument("--beta", type=float, default=None, help="Exponent of the powerlaw problem.")
    shared.add_argument("--dim", type=int, default=None, help="Dimension of the linear problem.")
    shared.add_argument("--clip", type=float, default=None, help="Clip the right-hand side to this radius.")
    shared.add_argument("--scheme", choices=SCHEMES, default=None, help="Galerkin scheme (default cg).")
    shared.add_argument("--degree", type=int, default=None, help="Polynomial degree r (default 0).")
    shared.add_argument("--fp-tol", dest="fp_tolerance", type=float, default=None, help="Picard tolerance.")
    shared.add_argument("--fp-max-iters", type=int, default=None, help="Picard iteration limit.")
    shared.add_argument("--quad-nodes", type=_quad_nodes, default=None, help="Gauss nodes or 'auto'.")
    shared.add_argument("--out", type=str, default=None, help="Output file; omitted means standard output.")
    shared.add_argument("--format", choices=("csv", "json"), default=None, help="Output format (default csv).")
    shared.add_argument("-v", "--verbose", action="count", default=0, help="Increase log verbosity.")
    return shared


def _add_blowup_flags(parser: argparse.ArgumentParser) -> None:
    """Add the step-rule flags shared by ``blowup`` and ``sweep``.

    Args:
        parser: Subcommand parser to extend.

    Returns:
        None: This function does not return a value.

    """

    parser.add_argument(
        "--mode",
        choices=("theoretical", "empirical"),
        default=None,
        help="Step-size rule (default empirical).",
    )
    parser.add_argument("--tau", type=float, default=None, help="Stop once k_m <= tau (default 0).")
    parser.add_argument("--rho0", type=float, default=None, help="Reference parameter for theoretical mode.")


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser used by the CLI.

    Returns:
        argparse.ArgumentParser: Configured parser with all subcommands.

    """

    shared = _shared_parser()
    parser = argparse.ArgumentParser(prog="galerkin-blowup", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", parents=[shared], help="Solve on a fixed mesh.")
    solve.add_argument("--horizon", type=float, default=None, help="Final time of a uniform mesh.")
    solve.add_argument("--steps", type=int, default=None, help="Number of uniform intervals.")
    solve.add_argument("--nodes", type=_float_list, default=None, help="Explicit mesh, e.g. 0,0.1,0.3.")
    solve.add_argument("--samples", type=int, default=None, help="Points per interval in the output table.")

    blowup = commands.add_parser("blowup", parents=[shared], help="Estimate the blow-up time.")
    blowup.add_argument("--rho", type=float, default=None, help="Step parameter.")
    _add_blowup_flags(blowup)

    sweep = commands.add_parser("sweep", parents=[shared], help="Run the rho convergence study.")
    sweep.add_argument("--rho-list", type=_float_list, default=None, help="Step parameters (default 2^(-p/2)).")
    sweep.add_argument("--schemes", type=_str_list, default=None, help="Schemes, e.g. cg,dg.")
    sweep.add_argument("--degrees", type=_int_list, default=None, help="Degrees, e.g. 0,1.")
    sweep.add_argument("--jobs", type=int, default=None, help="Worker processes (default: CPU count).")
    _add_blowup_flags(sweep)
    return parser


def _configure_logging(verbosity: int) -> None:
    """Configure the root logger from the number of ``-v`` flags.

    Args:
        verbosity: ``0`` for warnings, ``1`` for INFO, ``2`` or more for DEBUG.

    Returns:
        None: This function does not return a value.

    """

    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cmd_solve(cfg: RunConfig, problem: Problem) -> int:
    """Solve on the configured mesh and print the nodal values.

    Args:
        cfg: Validated configuration.
        problem: Problem to solve.

    Returns:
        int: ``0``.

    Raises:
        NonConvergenceError: If a step fails.

    """

    if cfg.nodes is not None:
        nodes = list(cfg.nodes)
    else:
        nodes = list(uniform_nodes(cfg.horizon, cfg.steps))
    degrees = [cfg.degree] * (len(nodes) - 1)
    traj = solve_mesh(problem, nodes, degrees, cfg.scheme, solver_config(cfg))

    print(table_to_csv(trajectory_table(traj, problem)), end="")
    if problem.exact is not None:
        print(f"L-infinity error estimate: {traj.sup_error(problem.exact):.17g}")
    if cfg.out is not None:
        if cfg.format == "json":
            document_to_json(trajectory_to_dict(traj), cfg.out)
        else:
            table_to_csv(trajectory_table(traj, problem, cfg.samples), cfg.out)
    return 0


def cmd_blowup(cfg: RunConfig, problem: Problem) -> int:
    """Estimate the blow-up time and print a summary.

    Args:
        cfg: Validated configuration.
        problem: Problem with growth constants.

    Returns:
        int: ``0``.

    Raises:
        GrowthHypothesisError: If the step parameter is not admissible.
        NonConvergenceError: If a step fails.

    """

    plan = StepPlan.for_scheme(cfg.rho, cfg.scheme, mode=cfg.mode, rho_0=resolved_rho0(cfg, problem))
    result = blowup_run(problem, problem.growth, plan, cfg.scheme, cfg.degree, solver_config(cfg), tau=cfg.tau)

    print(f"T_estimate: {result.t_infinity_estimate:.17g}")
    print(f"steps: {result.steps}")
    print(f"stopped_by: {result.stopped_by}")
    if result.abs_error is not None:
        print(f"abs_error: {result.abs_error:.17g}")
    print(f"upper_bound_continuous: {result.diagnostics.upper_bound_continuous:.17g}")
    if result.diagnostics.upper_bound_discrete is not None:
        print(f"upper_bound_discrete: {result.diagnostics.upper_bound_discrete:.17g}")
    if cfg.out is not None:
        if cfg.format == "json":
            document_to_json(blowup_to_dict(result), cfg.out)
        else:
            table_to_csv(blowup_table(result), cfg.out)
    return 0


def cmd_sweep(cfg: RunConfig, problem: Problem) -> int:
    """Run the convergence study and emit the sweep table.

    The table goes to ``--out`` or standard output; slope estimates are
    printed to standard output when a file is written and to standard error
    otherwise.

    Args:
        cfg: Validated configuration.
        problem: Problem with growth constants.

    Returns:
        int: ``0`` unless every cell failed, then ``1``.

    """

    study = ConvergenceStudy(
        cfg.problem,
        cfg.rho_list,
        cfg.schemes,
        cfg.degrees,
        problem_params=problem_params(cfg),
        clip=cfg.clip,
        mode=cfg.mode,
        rho_0=resolved_rho0(cfg, problem),
        tau=cfg.tau,
        solver=solver_config(cfg),
    )
    result = study.run(cfg.jobs)

    if cfg.format == "json":
        document = {
            "rows": [asdict(row) for row in result.rows],
            "slopes": [asdict(slope) for slope in result.slopes],
        }
        text = document_to_json(document, cfg.out)
    else:
        text = table_to_csv(sweep_table(result.rows), cfg.out)
    summary = slopes_table(result.slopes).to_string(index=False)
    if cfg.out is None:
        print(text, end="")
        print(summary, file=sys.stderr)
    else:
        print(summary)
    return 1 if result.failed == len(result.rows) else 0


COMMAND_HANDLERS: dict[str, Callable[[RunConfig, Problem], int]] = {
    "solve": cmd_solve,
    "blowup": cmd_blowup,
    "sweep": cmd_sweep,
}
"""Handler of each subcommand."""


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return an exit code compatible with ``sys.exit``.

    Args:
        argv: Optional list of arguments for testing. When ``None`` the
            arguments are read from :data:`sys.argv`.

    Returns:
        int: ``0`` when successful, ``1`` when a step solver fails, ``2``
        when the configuration is invalid.

    """

    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    overrides = {name: getattr(args, name, None) for name in OVERRIDE_FIELDS}
    try:
        cfg = build_run_config(args.config, **overrides)
        validate(cfg, args.command)
        problem = build_configured_problem(cfg, args.command)
    except ValueError as error:
        parser.error(str(error))
        return 2

    try:
        return COMMAND_HANDLERS[args.command](cfg, problem)
    except NonConvergenceError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except ValueError as error:
        parser.error(str(error))
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
