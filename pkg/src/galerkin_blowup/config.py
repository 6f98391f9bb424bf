"""Parse and validate run configurations for the command-line interface.

A run is described by a flat :class:`RunConfig`. Values come from three
layers: the dataclass defaults, an optional TOML file with the sections
``[problem]``, ``[discretization]``, ``[mesh]``, ``[solver]``, ``[blowup]`` and
``[output]``, and finally the command-line flags. The helpers here merge the
layers and reject inconsistent combinations with a ``ValueError`` whose message
is shown to the user.

"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 fallback with the same API
    import tomli as tomllib

from .blowup import STEP_MODES, default_rho_0
from .problems import PROBLEMS, Problem, build_problem
from .stepping import SCHEMES, SolverConfig

OUTPUT_FORMATS: tuple[str, ...] = ("csv", "json")
"""Supported artifact formats."""

COMMANDS: tuple[str, ...] = ("solve", "blowup", "sweep")
"""Commands understood by :func:`validate`."""

SECTION_FIELDS: dict[str, tuple[str, ...]] = {
    "problem": ("problem", "lam", "u0", "alpha", "beta", "dim", "clip"),
    "discretization": ("scheme", "degree", "schemes", "degrees"),
    "mesh": ("horizon", "steps", "nodes"),
    "solver": ("fp_tolerance", "fp_max_iters", "quad_nodes"),
    "blowup": ("mode", "rho", "rho_list", "tau", "rho0", "jobs"),
    "output": ("out", "format", "samples"),
}
"""Keys accepted in each TOML section; every key names a :class:`RunConfig` field."""

SECTION_ALIASES: dict[tuple[str, str], str] = {("problem", "name"): "problem"}
"""Alternative spellings of keys within a section."""

TUPLE_FIELDS: frozenset[str] = frozenset({"schemes", "degrees", "nodes", "rho_list"})
"""Fields stored as tuples."""


@dataclass(frozen=True)
class RunConfig:
    """Complete description of a ``solve``, ``blowup`` or ``sweep`` run.

    Attributes:
        problem: Registry name of the problem.
        lam: Rate of the ``linear`` problem.
        u0: Initial value override (scalar problems).
        alpha: Growth constant of the ``powerlaw`` problem.
        beta: Exponent of the ``powerlaw`` problem.
        dim: Dimension of the ``linear`` problem.
        clip: Optional clipping radius for the right-hand side.
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        schemes: Schemes of a sweep.
        degrees: Degrees of a sweep.
        horizon: Final time of a uniform mesh.
        steps: Interval count of a uniform mesh.
        nodes: Explicit mesh nodes.
        fp_tolerance: Picard stopping tolerance.
        fp_max_iters: Picard iteration limit.
        quad_nodes: Gauss node count or ``"auto"``.
        mode: Blow-up step mode.
        rho: Step parameter of a blow-up run.
        rho_list: Step parameters of a sweep.
        tau: Step threshold of the blow-up loop.
        rho0: Reference parameter for theoretical mode.
        jobs: Worker processes of a sweep.
        out: Output path; ``None`` writes to standard output.
        format: ``"csv"`` or ``"json"``.
        samples: Points per interval in trajectory tables (``1`` is nodal).

    """

    problem: str = "example54"
    lam: float | None = None
    u0: float | None = None
    alpha: float | None = None
    beta: float | None = None
    dim: int | None = None
    clip: float | None = None
    scheme: str = "cg"
    degree: int = 0
    schemes: tuple[str, ...] = ("cg", "dg")
    degrees: tuple[int, ...] = (0, 1)
    horizon: float | None = None
    steps: int | None = None
    nodes: tuple[float, ...] | None = None
    fp_tolerance: float = 1e-12
    fp_max_iters: int = 200
    quad_nodes: int | str = "auto"
    mode: str = "empirical"
    rho: float | None = None
    rho_list: tuple[float, ...] | None = None
    tau: float = 0.0
    rho0: float | None = None
    jobs: int | None = None
    out: str | None = None
    format: str = "csv"
    samples: int = 1


def _coerce(name: str, value: Any) -> Any:
    """Normalise a raw setting for the :class:`RunConfig` field ``name``.

    Args:
        name: Field name.
        value: Value read from TOML or the command line.

    Returns:
        Any: A tuple for list fields (comma-separated strings are split),
        otherwise ``value`` unchanged.

    """

    if name in TUPLE_FIELDS and value is not None:
        if isinstance(value, str):
            value = [item for item in value.split(",") if item.strip()]
        return tuple(value)
    return value


def load_run_config(path: str | Path) -> dict[str, Any]:
    """Return the field values stored in the TOML file at ``path``.

    Args:
        path: Location of the TOML configuration.

    Returns:
        dict[str, Any]: Mapping from :class:`RunConfig` field names to values.

    Raises:
        ValueError: If the file cannot be read or parsed, or contains unknown
            sections or keys.

    """

    try:
        with Path(path).open("rb") as handle:
            document = tomllib.load(handle)
    except OSError as error:
        msg = f"Cannot read configuration {path}: {error}"
        raise ValueError(msg) from error
    except tomllib.TOMLDecodeError as error:
        msg = f"Malformed configuration {path}: {error}"
        raise ValueError(msg) from error

    values: dict[str, Any] = {}
    for section, entries in document.items():
        if section not in SECTION_FIELDS or not isinstance(entries, dict):
            msg = f"Unknown configuration section [{section}]"
            raise ValueError(msg)
        for key, value in entries.items():
            name = SECTION_ALIASES.get((section, key), key)
            if name not in SECTION_FIELDS[section]:
                msg = f"Unknown key '{key}' in section [{section}]"
                raise ValueError(msg)
            values[name] = _coerce(name, value)
    return values


def merge_overrides(cfg: RunConfig, **overrides: Any) -> RunConfig:
    """Return ``cfg`` with every non-``None`` override applied.

    Args:
        cfg: Base configuration.
        **overrides: Field values; ``None`` means "not given".

    Returns:
        RunConfig: Updated configuration.

    Raises:
        ValueError: If an override names an unknown field.

    """

    known = {item.name for item in fields(RunConfig)}
    unknown = sorted(set(overrides) - known)
    if unknown:
        msg = f"Unknown configuration fields: {', '.join(unknown)}"
        raise ValueError(msg)
    given = {name: _coerce(name, value) for name, value in overrides.items() if value is not None}
    return replace(cfg, **given)


def build_run_config(path: str | Path | None = None, **overrides: Any) -> RunConfig:
    """Return defaults, then the TOML file at ``path``, then ``overrides``."""

    cfg = RunConfig()
    if path is not None:
        cfg = merge_overrides(cfg, **load_run_config(path))
    return merge_overrides(cfg, **overrides)


def validate(cfg: RunConfig, command: str) -> None:
    """Reject inconsistent settings for ``command``.

    Args:
        cfg: Configuration to check.
        command: ``"solve"``, ``"blowup"`` or ``"sweep"``.

    Returns:
        None: This function does not return a value.

    Raises:
        ValueError: With a diagnostic describing the first inconsistency.

    """

    if command not in COMMANDS:
        msg = f"Unknown command {command!r}"
        raise ValueError(msg)
    if cfg.problem not in PROBLEMS:
        msg = f"Unknown problem {cfg.problem!r}; choose from {sorted(PROBLEMS)}"
        raise ValueError(msg)
    for scheme in (cfg.scheme, *cfg.schemes):
        if scheme not in SCHEMES:
            msg = f"Unknown scheme {scheme!r}; expected one of {SCHEMES}"
            raise ValueError(msg)
    if cfg.degree < 0 or any(int(degree) < 0 for degree in cfg.degrees):
        msg = "Polynomial degrees must be non-negative"
        raise ValueError(msg)
    if cfg.format not in OUTPUT_FORMATS:
        msg = f"Unknown output format {cfg.format!r}; expected one of {OUTPUT_FORMATS}"
        raise ValueError(msg)
    if cfg.mode not in STEP_MODES:
        msg = f"Unknown step mode {cfg.mode!r}; expected one of {STEP_MODES}"
        raise ValueError(msg)
    if cfg.samples < 1:
        msg = f"Samples per interval must be positive, received {cfg.samples}"
        raise ValueError(msg)
    if cfg.tau < 0.0:
        msg = f"tau must be non-negative, received {cfg.tau}"
        raise ValueError(msg)
    if cfg.jobs is not None and cfg.jobs < 1:
        msg = f"jobs must be positive, received {cfg.jobs}"
        raise ValueError(msg)
    solver_config(cfg)

    if command == "solve":
        if cfg.nodes is None and (cfg.horizon is None or cfg.steps is None):
            msg = "solve needs a mesh: give nodes, or both horizon and steps"
            raise ValueError(msg)
        if cfg.nodes is not None and len(cfg.nodes) < 2:
            msg = "An explicit mesh needs at least two nodes"
            raise ValueError(msg)
    elif command == "blowup":
        if cfg.rho is None:
            msg = "blowup needs a step parameter rho"
            raise ValueError(msg)
        if cfg.rho <= 0.0:
            msg = f"rho must be positive, received {cfg.rho}"
            raise ValueError(msg)
    elif cfg.rho_list is not None:
        if not cfg.rho_list or any(float(rho) <= 0.0 for rho in cfg.rho_list):
            msg = "sweep needs a non-empty list of positive rho values"
            raise ValueError(msg)
    if command == "sweep" and (not cfg.schemes or not cfg.degrees):
        msg = "sweep needs at least one scheme and one degree"
        raise ValueError(msg)


def problem_params(cfg: RunConfig) -> dict[str, Any]:
    """Return the problem parameters of ``cfg`` (unset values omitted)."""

    values = {"lam": cfg.lam, "u0": cfg.u0, "alpha": cfg.alpha, "beta": cfg.beta, "dim": cfg.dim}
    return {key: value for key, value in values.items() if value is not None}


def build_configured_problem(cfg: RunConfig, command: str) -> Problem:
    """Build the configured problem and check it supports ``command``.

    Args:
        cfg: Validated configuration.
        command: Command about to run.

    Returns:
        Problem: The configured problem.

    Raises:
        ValueError: If the parameters are invalid or blow-up runs are requested
            for a problem without growth constants.

    """

    problem = build_problem(cfg.problem, clip=cfg.clip, **problem_params(cfg))
    if command in ("blowup", "sweep") and problem.growth is None:
        msg = f"Problem {problem.name!r} has no growth constants; blow-up runs are not available"
        raise ValueError(msg)
    return problem


def solver_config(cfg: RunConfig) -> SolverConfig:
    """Return the Picard settings of ``cfg``."""

    quad = cfg.quad_nodes if cfg.quad_nodes == "auto" else int(cfg.quad_nodes)
    return SolverConfig(fp_tolerance=cfg.fp_tolerance, fp_max_iters=cfg.fp_max_iters, quad_nodes=quad)


def resolved_rho0(cfg: RunConfig, problem: Problem) -> float | None:
    """Return the configured ``rho_0`` or, in theoretical mode, the default ``0.9 min(1, rho_bar)``."""

    if cfg.rho0 is not None or cfg.mode != "theoretical" or problem.growth is None:
        return cfg.rho0
    return default_rho_0(problem.growth)
