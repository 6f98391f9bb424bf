"""Solve the local cG and dG problems by Picard iteration and march over a mesh.

On a time step ``I_m`` the continuous Galerkin solution of degree ``r + 1`` is
the fixed point of ``T_cG(U) = pi u_prev + integral of Pi_r F(U)`` and the
discontinuous Galerkin solution of degree ``r`` is the fixed point of
``T_dG(U) = pi u_prev + chi^{-1}(Pi_r F(U))``. Both maps are contractions when
the step is small enough, so the solvers iterate them from the constant
initial guess ``pi u_prev`` and report a :class:`NonConvergenceError` when the
step is too large. :func:`solve_mesh` chains the local solves over a time
partition.

"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Literal, Sequence

import numpy as np

from .dg_operators import chi_build, chi_solve
from .legendre import IntervalMap, QuadRule, gauss_rule, legendre_vandermonde, map_to_interval
from .poly_traj import (
    PolyTraj,
    antiderivative_from_left,
    derivative,
    project_values,
    sample_grid,
    sup_norm,
)

if TYPE_CHECKING:
    from .problems import Problem

logger = logging.getLogger(__name__)

Scheme = Literal["cg", "dg"]
"""Galerkin time stepping variant."""

SCHEMES: tuple[str, ...] = ("cg", "dg")
"""Supported scheme identifiers."""

ORTHONORMAL_TOLERANCE: float = 1e-12
"""Allowed deviation of ``B^T B`` from the identity for subspace bases."""


class NonConvergenceError(RuntimeError):
    """Raised when the Picard iteration of a step does not converge.

    Attributes:
        iterations: Number of performed iterations.
        last_delta: Sup-norm of the last iterate difference.
        interval_index: Index of the failing interval when known.

    """

    def __init__(self, iterations: int, last_delta: float, interval_index: int | None = None) -> None:
        self.iterations = iterations
        self.last_delta = last_delta
        self.interval_index = interval_index
        where = "" if interval_index is None else f" on interval {interval_index}"
        super().__init__(
            f"Picard iteration did not converge{where} after {iterations} iterations "
            f"(last change {last_delta:.3e}); reduce the step size"
        )


class BallContainmentWarning(UserWarning):
    """Emitted when a Picard iterate leaves the ball ``||y - pi u_prev|| <= kappa``."""


@dataclass(frozen=True, eq=False)
class SolverConfig:
    """Settings of the Picard step solvers.

    Attributes:
        fp_tolerance: Relative-absolute stopping tolerance.
        fp_max_iters: Maximum number of Picard iterations per step.
        quad_nodes: Number of Gauss nodes for ``Pi F(U)`` or ``"auto"`` for
            ``r + 4`` with ``r`` the projection degree.
        subspace_basis: Optional ``N x d`` array with orthonormal columns
            spanning the subspace ``H_m``.

    """

    fp_tolerance: float = 1e-12
    fp_max_iters: int = 200
    quad_nodes: int | str = "auto"
    subspace_basis: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Validate the solver settings.

        Returns:
            None: This method does not return a value.

        Raises:
            ValueError: If a setting is out of range.

        """

        if not self.fp_tolerance > 0.0:
            msg = f"Fixed-point tolerance must be positive, received {self.fp_tolerance}"
            raise ValueError(msg)
        if self.fp_max_iters < 1:
            msg = f"At least one fixed-point iteration is required, received {self.fp_max_iters}"
            raise ValueError(msg)
        if self.quad_nodes != "auto" and (not isinstance(self.quad_nodes, int) or self.quad_nodes < 1):
            msg = f"Quadrature node count must be a positive integer or 'auto', received {self.quad_nodes!r}"
            raise ValueError(msg)
        if self.subspace_basis is not None:
            basis = np.array(self.subspace_basis, dtype=float)
            check_orthonormal(basis)
            basis.setflags(write=False)
            object.__setattr__(self, "subspace_basis", basis)

    def quad_rule(self, projection_degree: int) -> QuadRule:
        """Return the Gauss rule used to project onto ``projection_degree``.

        Args:
            projection_degree: Degree ``r`` of the L2 projection.

        Returns:
            QuadRule: Rule with ``quad_nodes`` (or ``r + 4``) nodes, at least
            ``r + 1``.

        """

        count = projection_degree + 4 if self.quad_nodes == "auto" else int(self.quad_nodes)
        return gauss_rule(max(count, projection_degree + 1))


@dataclass(frozen=True, eq=False)
class StepResult:
    """Outcome of one local Galerkin solve.

    Attributes:
        traj: Solution on the time step.
        iterations: Number of Picard iterations.
        residual: Sup-norm of the last iterate difference.
        left_value: ``U_{m-1}^+``; exactly ``pi u_prev`` for cG.
        right_value: ``U_m^-``.
        deltas: Iterate differences of every Picard iteration.
        ball_violations: Iterates outside the ball of radius ``kappa``.

    """

    traj: PolyTraj
    iterations: int
    residual: float
    left_value: np.ndarray
    right_value: np.ndarray
    deltas: tuple[float, ...] = ()
    ball_violations: int = 0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Piecewise polynomial solution over a time partition.

    Attributes:
        pieces: Step results in time order.
        nodes: Time nodes ``t_0 < t_1 < ...``.
        scheme: ``"cg"`` or ``"dg"``.
        degrees: Polynomial degree ``r_m`` of each interval.
        initial_value: The initial condition ``u_0 = U_0^-``.

    """

    pieces: tuple[StepResult, ...]
    nodes: np.ndarray
    scheme: str
    degrees: tuple[int, ...]
    initial_value: np.ndarray

    def evaluate(self, t: float) -> np.ndarray:
        """Return ``U(t)``; at an interior node the left limit ``U_m^-`` is used.

        Args:
            t: Time in ``[t_0, t_M]``.

        Returns:
            numpy.ndarray: Solution vector.

        Raises:
            ValueError: If ``t`` lies outside the mesh.

        """

        if t < self.nodes[0] or t > self.nodes[-1]:
            msg = f"Time {t} outside the mesh [{self.nodes[0]}, {self.nodes[-1]}]"
            raise ValueError(msg)
        index = int(np.searchsorted(self.nodes, t, side="left")) - 1
        index = min(max(index, 0), len(self.pieces) - 1)
        interval = self.pieces[index].traj.interval
        return self.pieces[index].traj.eval(min(max(t, interval.t_start), interval.t_end))

    def nodal_values(self) -> np.ndarray:
        """Return ``U_0^-, U_1^-, ..., U_M^-`` as an ``(M + 1, N)`` array."""

        rows = [self.initial_value] + [piece.right_value for piece in self.pieces]
        return np.vstack(rows)

    def jumps(self) -> np.ndarray:
        """Return the jumps ``U_m^+ - U_m^-`` for ``m = 0, ..., M - 1``."""

        minus = self.nodal_values()[:-1]
        plus = np.vstack([piece.left_value for piece in self.pieces])
        return plus - minus

    def sup_error(self, exact: Callable[[np.ndarray], np.ndarray]) -> float:
        """Estimate ``max_t ||U(t) - u(t)||`` on the Chebyshev sample grids.

        Args:
            exact: Exact solution evaluated on an array of times.

        Returns:
            float: Largest sampled error.

        """

        worst = 0.0
        for piece in self.pieces:
            grid = sample_grid(piece.traj.degree)
            times = np.asarray(map_to_interval(piece.traj.interval, grid))
            errors = piece.traj.eval_reference(grid) - np.asarray(exact(times)).reshape(len(grid), -1)
            worst = max(worst, float(np.linalg.norm(errors, axis=1).max()))
        return worst


def check_orthonormal(basis: np.ndarray) -> None:
    """Raise unless ``basis`` has orthonormal columns.

    Args:
        basis: ``N x d`` array.

    Returns:
        None: This function does not return a value.

    Raises:
        ValueError: If the columns are not orthonormal within tolerance.

    """

    if basis.ndim != 2 or basis.shape[1] == 0 or basis.shape[1] > basis.shape[0]:
        msg = f"Subspace basis must be an N x d array with 1 <= d <= N, received shape {basis.shape}"
        raise ValueError(msg)
    gram = basis.T @ basis
    if np.max(np.abs(gram - np.eye(basis.shape[1]))) > ORTHONORMAL_TOLERANCE:
        msg = "Subspace basis columns are not orthonormal"
        raise ValueError(msg)


def subspace_project(x: np.ndarray, basis: np.ndarray | None = None) -> np.ndarray:
    """Return the orthogonal projection of ``x`` onto ``span(basis)``.

    Args:
        x: Vector or array of vectors along the last axis.
        basis: Optional orthonormal ``N x d`` array; ``None`` means the whole
            space.

    Returns:
        numpy.ndarray: ``x`` itself when ``basis`` is ``None``, otherwise
        ``B B^T x``.

    Raises:
        ValueError: If ``basis`` is not orthonormal.

    """

    if basis is None:
        return x
    basis = np.asarray(basis, dtype=float)
    check_orthonormal(basis)
    return (np.asarray(x, dtype=float) @ basis) @ basis.T


def _rhs_at_nodes(problem: Problem, times: np.ndarray, states: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Evaluate the projected right-hand side at quadrature nodes.

    Args:
        problem: Problem supplying ``F``.
        times: Physical quadrature times of shape ``(q,)``.
        states: Trajectory values at those times, shape ``(q, N)``.
        cfg: Solver settings holding the optional subspace basis.

    Returns:
        numpy.ndarray: ``pi F(t, U(t))`` with the shape of ``states``.

    """

    values = np.asarray(problem.rhs(times, states), dtype=float).reshape(states.shape)
    return subspace_project(values, cfg.subspace_basis)


def _picard(
    update: Callable[[PolyTraj], PolyTraj],
    initial: PolyTraj,
    cfg: SolverConfig,
    center: np.ndarray,
    kappa: float | None,
) -> tuple[PolyTraj, list[float], int]:
    """Iterate ``update`` from ``initial`` until the sup-norm change is small."""

    grid = sample_grid(initial.degree)
    current = initial
    deltas: list[float] = []
    violations = 0
    for iteration in range(1, cfg.fp_max_iters + 1):
        candidate = update(current)
        samples = candidate.eval_reference(grid)
        delta = float(np.linalg.norm(samples - current.eval_reference(grid), axis=1).max())
        deltas.append(delta)
        if not np.isfinite(delta):
            raise NonConvergenceError(iteration, delta)
        if kappa is not None:
            distance = float(np.linalg.norm(samples - center, axis=1).max())
            if distance > kappa * (1.0 + 1e-12):
                violations += 1
        current = candidate
        scale = float(np.linalg.norm(samples, axis=1).max())
        if delta <= cfg.fp_tolerance * (1.0 + scale):
            if violations:
                warnings.warn(
                    f"{violations} Picard iterate(s) left the ball of radius {kappa:.6g}",
                    BallContainmentWarning,
                    stacklevel=3,
                )
            return current, deltas, violations
    raise NonConvergenceError(cfg.fp_max_iters, deltas[-1])


def cg_step(
    problem: Problem,
    u_prev: np.ndarray,
    interval: IntervalMap,
    degree: int,
    cfg: SolverConfig | None = None,
    kappa: float | None = None,
) -> StepResult:
    """Solve the cG problem on one step by Picard iteration.

    The trial space has degree ``degree + 1`` and the test space degree
    ``degree``; the returned trajectory is anchored at ``pi u_prev``, so its
    value at ``t_start`` equals the projected previous value exactly.

    Args:
        problem: Initial value problem supplying the right-hand side.
        u_prev: End value ``U_{m-1}`` of the previous step.
        interval: Time step ``I_m``.
        degree: Test degree ``r``.
        cfg: Solver settings; defaults to :class:`SolverConfig`.
        kappa: Optional ball radius for containment checks.

    Returns:
        StepResult: The converged step.

    Raises:
        NonConvergenceError: If the iteration does not converge.
        ValueError: If ``degree`` is negative.

    """

    if degree < 0:
        msg = f"Polynomial degree must be non-negative, received {degree}"
        raise ValueError(msg)
    cfg = cfg or SolverConfig()
    center = np.array(subspace_project(np.atleast_1d(np.asarray(u_prev, dtype=float)), cfg.subspace_basis))
    quad = cfg.quad_rule(degree)
    times = np.asarray(map_to_interval(interval, quad.nodes))
    base = PolyTraj.constant(center, interval, degree + 1)

    def update(current: PolyTraj) -> PolyTraj:
        values = _rhs_at_nodes(problem, times, current.eval_reference(quad.nodes), cfg)
        return base + antiderivative_from_left(project_values(values, interval, degree, quad))

    traj, deltas, violations = _picard(update, base, cfg, center, kappa)
    traj = traj.anchored(center)
    logger.debug("cG step on [%g, %g]: %d iterations, change %.3e", interval.t_start, interval.t_end, len(deltas), deltas[-1])
    return StepResult(
        traj=traj,
        iterations=len(deltas),
        residual=deltas[-1],
        left_value=center,
        right_value=traj.right_value,
        deltas=tuple(deltas),
        ball_violations=violations,
    )


def dg_step(
    problem: Problem,
    u_prev_minus: np.ndarray,
    interval: IntervalMap,
    degree: int,
    cfg: SolverConfig | None = None,
    kappa: float | None = None,
) -> StepResult:
    """Solve the dG problem on one step by Picard iteration.

    Args:
        problem: Initial value problem supplying the right-hand side.
        u_prev_minus: Left-sided value ``U_{m-1}^-``.
        interval: Time step ``I_m``.
        degree: Trial and test degree ``r``.
        cfg: Solver settings; defaults to :class:`SolverConfig`.
        kappa: Optional ball radius for containment checks.

    Returns:
        StepResult: The converged step.

    Raises:
        NonConvergenceError: If the iteration does not converge.
        ValueError: If ``degree`` is negative.

    """

    if degree < 0:
        msg = f"Polynomial degree must be non-negative, received {degree}"
        raise ValueError(msg)
    cfg = cfg or SolverConfig()
    center = np.array(subspace_project(np.atleast_1d(np.asarray(u_prev_minus, dtype=float)), cfg.subspace_basis))
    quad = cfg.quad_rule(degree)
    times = np.asarray(map_to_interval(interval, quad.nodes))
    op = chi_build(degree, interval)
    base = PolyTraj.constant(center, interval, degree)

    def update(current: PolyTraj) -> PolyTraj:
        values = _rhs_at_nodes(problem, times, current.eval_reference(quad.nodes), cfg)
        return base + chi_solve(op, project_values(values, interval, degree, quad))

    traj, deltas, violations = _picard(update, base, cfg, center, kappa)
    logger.debug("dG step on [%g, %g]: %d iterations, change %.3e", interval.t_start, interval.t_end, len(deltas), deltas[-1])
    return StepResult(
        traj=traj,
        iterations=len(deltas),
        residual=deltas[-1],
        left_value=traj.left_value,
        right_value=traj.right_value,
        deltas=tuple(deltas),
        ball_violations=violations,
    )


def weak_residual(
    problem: Problem,
    step: StepResult,
    scheme: str,
    u_prev: np.ndarray,
    cfg: SolverConfig | None = None,
) -> float:
    """Return the Galerkin residual of an accepted step.

    The residual is ``integral (U' - F(U), K_j) + (jump, K_j(t_{m-1}))`` for
    every Legendre test function of the test degree (the jump term only for
    dG), evaluated with the solver's quadrature rule, and divided by
    ``1 + sup_norm(U)``.

    Args:
        problem: Problem the step was solved for.
        step: Accepted step result.
        scheme: ``"cg"`` or ``"dg"``.
        u_prev: ``U_{m-1}`` (cG) or ``U_{m-1}^-`` (dG).
        cfg: Solver settings used for the step.

    Returns:
        float: Largest residual norm over the test functions.

    Raises:
        ValueError: If ``scheme`` is unknown.

    """

    if scheme not in SCHEMES:
        msg = f"Unknown scheme {scheme!r}; expected one of {SCHEMES}"
        raise ValueError(msg)
    cfg = cfg or SolverConfig()
    traj = step.traj
    interval = traj.interval
    test_degree = traj.degree - 1 if scheme == "cg" else traj.degree
    quad = cfg.quad_rule(test_degree)
    times = np.asarray(map_to_interval(interval, quad.nodes))
    integrand = derivative(traj).eval_reference(quad.nodes) - _rhs_at_nodes(
        problem, times, traj.eval_reference(quad.nodes), cfg
    )
    tests = legendre_vandermonde(quad.nodes, test_degree)
    residual = 0.5 * interval.k * (tests * quad.weights[:, None]).T @ integrand
    if scheme == "dg":
        jump = traj.left_value - np.atleast_1d(np.asarray(u_prev, dtype=float))
        signs = (-1.0) ** np.arange(test_degree + 1)
        residual = residual + np.outer(signs, jump)
    residual = subspace_project(residual, cfg.subspace_basis)
    return float(np.linalg.norm(residual, axis=1).max() / (1.0 + sup_norm(traj).value))


def uniform_nodes(horizon: float, steps: int, start: float = 0.0) -> np.ndarray:
    """Return ``steps + 1`` equidistant nodes from ``start`` to ``start + horizon``.

    Raises:
        ValueError: If ``horizon`` or ``steps`` is not positive.

    """

    if horizon <= 0.0 or steps < 1:
        msg = f"Uniform meshes need a positive horizon and step count, received {horizon} and {steps}"
        raise ValueError(msg)
    return np.linspace(start, start + horizon, steps + 1)


def solve_mesh(
    problem: Problem,
    nodes: Sequence[float],
    degrees: Sequence[int],
    scheme: str,
    cfg: SolverConfig | None = None,
) -> Trajectory:
    """March the cG or dG scheme over a time partition.

    The end value of each step (``U_m`` for cG, ``U_m^-`` for dG) seeds the
    next step; ``U_0^- = u_0``.

    Args:
        problem: Initial value problem.
        nodes: Strictly increasing time nodes.
        degrees: Degree ``r_m`` of every interval.
        scheme: ``"cg"`` or ``"dg"``.
        cfg: Solver settings.

    Returns:
        Trajectory: The piecewise polynomial solution.

    Raises:
        ValueError: If the mesh, degrees or scheme are inconsistent.
        NonConvergenceError: With ``interval_index`` set when a step fails.

    """

    if scheme not in SCHEMES:
        msg = f"Unknown scheme {scheme!r}; expected one of {SCHEMES}"
        raise ValueError(msg)
    mesh = np.asarray(nodes, dtype=float)
    if mesh.ndim != 1 or mesh.shape[0] < 2 or np.any(np.diff(mesh) <= 0.0):
        msg = "Mesh nodes must be a strictly increasing sequence of at least two times"
        raise ValueError(msg)
    if len(degrees) != mesh.shape[0] - 1:
        msg = f"Expected {mesh.shape[0] - 1} degrees, received {len(degrees)}"
        raise ValueError(msg)
    cfg = cfg or SolverConfig()
    step = cg_step if scheme == "cg" else dg_step
    initial = np.atleast_1d(np.asarray(problem.u0, dtype=float))
    value = initial
    pieces: list[StepResult] = []
    t_start = float(mesh[0])
    for index, degree in enumerate(degrees):
        # chain the intervals so that t_m = t_{m-1} + k_m holds exactly
        interval = IntervalMap(t_start=t_start, k=float(mesh[index + 1]) - t_start)
        t_start = interval.t_end
        try:
            result = step(problem, value, interval, int(degree), cfg)
        except NonConvergenceError as error:
            raise NonConvergenceError(error.iterations, error.last_delta, interval_index=index) from error
        pieces.append(result)
        value = result.right_value
    logger.info("Solved %d %s steps up to t=%g", len(pieces), scheme, mesh[-1])
    chained = np.array([mesh[0]] + [piece.traj.interval.t_end for piece in pieces])
    return Trajectory(
        pieces=tuple(pieces),
        nodes=chained,
        scheme=scheme,
        degrees=tuple(int(degree) for degree in degrees),
        initial_value=initial,
    )
