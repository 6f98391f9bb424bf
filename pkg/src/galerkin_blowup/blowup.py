"""Estimate finite blow-up times with Galerkin time stepping.

For right-hand sides with algebraic growth, ``||F(t, u)|| <= alpha ||u||^beta``
and ``(F(t, u), u) >= delta ||u||^(1 + beta)`` for ``||u|| >= c_F``, together
with the local Lipschitz bound ``gamma max(||u||, ||v||)^(beta - 1)``, the
solution blows up in finite time. Choosing steps proportional to
``||U_{m-1}^-||^(1 - beta)`` makes the discrete solutions blow up as well, and
the accumulated time ``sum_m k_m`` approximates the exact blow-up time. This
module holds the growth constants, the function ``Psi`` whose root bounds the
admissible step parameter, the step-size rules, the diagnostic bounds, and the
time marching loop :func:`blowup_run`.

"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Literal

import numpy as np
from scipy import optimize

from .dg_operators import CHI_INVERSE_CONSTANT
from .legendre import IntervalMap
from .stepping import SCHEMES, NonConvergenceError, SolverConfig, cg_step, dg_step

if TYPE_CHECKING:
    from .problems import Problem

logger = logging.getLogger(__name__)

StepMode = Literal["theoretical", "empirical"]
"""Step-size rule: the provable rule or the experimental ``rho ||U||^(1 - beta)``."""

STEP_MODES: tuple[str, ...] = ("theoretical", "empirical")
"""Supported step-size modes."""

ROOT_BRACKET_SHRINK: float = 1e-9
"""Relative distance of the upper root bracket from the pole ``gamma / alpha``."""

ROOT_TOLERANCE: float = 1e-12
"""Absolute tolerance of the bisection for the root of ``Psi``."""

DEFAULT_MAX_STEPS: int = 10_000_000
"""Safety limit on the number of blow-up steps."""


class GrowthHypothesisError(ValueError):
    """Raised when the blow-up hypotheses or the step parameter are violated."""


class GrowthBoundWarning(UserWarning):
    """Emitted when a step's growth factor leaves ``[1 + C0 rho, 1 + C1 rho]``."""


@dataclass(frozen=True)
class GrowthParams:
    """Growth and Lipschitz constants of a blowing-up right-hand side.

    Attributes:
        alpha: Upper growth constant (``alpha > 0``).
        beta: Growth exponent (``beta > 1``).
        delta: Lower growth constant (``delta > 0``).
        c_f: Norm threshold above which the growth bounds hold.
        gamma: Local Lipschitz constant for norms above ``c_f``.
        l_cf: Lipschitz constant on the ball of radius ``c_f``.

    """

    alpha: float
    beta: float
    delta: float
    c_f: float = 0.0
    gamma: float = 0.0
    l_cf: float = 0.0

    def __post_init__(self) -> None:
        """Validate positivity and finiteness.

        Returns:
            None: This method does not return a value.

        Raises:
            ValueError: If a constant is out of range.

        """

        values = (self.alpha, self.beta, self.delta, self.c_f, self.gamma, self.l_cf)
        if not all(math.isfinite(value) for value in values):
            msg = "Growth constants must be finite"
            raise ValueError(msg)
        if self.alpha <= 0.0 or self.delta <= 0.0:
            msg = f"alpha and delta must be positive, received {self.alpha} and {self.delta}"
            raise ValueError(msg)
        if self.beta <= 1.0:
            msg = f"beta must exceed 1, received {self.beta}"
            raise ValueError(msg)
        if self.c_f < 0.0 or self.gamma < 0.0 or self.l_cf < 0.0:
            msg = "c_f, gamma and l_cf must be non-negative"
            raise ValueError(msg)

    @property
    def rho_pole(self) -> float:
        """Return ``gamma / alpha``, the right end of the domain of ``Psi``."""

        return self.gamma / self.alpha


@dataclass(frozen=True)
class StepPlan:
    """Step-size rule for :func:`blowup_run`.

    Attributes:
        rho: Step parameter.
        mode: ``"theoretical"`` or ``"empirical"``.
        scheme_constant: ``1`` for cG and ``C_chi = 2`` for dG.
        rho_0: Reference parameter with ``0 < rho_0 < min(1, rho_bar)``;
            required in theoretical mode.

    """

    rho: float
    mode: str = "empirical"
    scheme_constant: float = 1.0
    rho_0: float | None = None

    def __post_init__(self) -> None:
        """Validate the mode and the sign of ``rho``.

        Returns:
            None: This method does not return a value.

        Raises:
            ValueError: If the mode is unknown or ``rho`` is not positive.

        """

        if self.mode not in STEP_MODES:
            msg = f"Unknown step mode {self.mode!r}; expected one of {STEP_MODES}"
            raise ValueError(msg)
        if not self.rho > 0.0:
            msg = f"Step parameter rho must be positive, received {self.rho}"
            raise ValueError(msg)
        if self.scheme_constant <= 0.0:
            msg = f"Scheme constant must be positive, received {self.scheme_constant}"
            raise ValueError(msg)

    @classmethod
    def for_scheme(cls, rho: float, scheme: str, mode: str = "empirical", rho_0: float | None = None) -> StepPlan:
        """Return a plan whose scheme constant matches ``scheme``.

        Args:
            rho: Step parameter.
            scheme: ``"cg"`` or ``"dg"``.
            mode: ``"theoretical"`` or ``"empirical"``.
            rho_0: Reference parameter for theoretical mode.

        Returns:
            StepPlan: Plan with ``scheme_constant`` 1 (cG) or 2 (dG).

        Raises:
            ValueError: If ``scheme`` is unknown.

        """

        if scheme not in SCHEMES:
            msg = f"Unknown scheme {scheme!r}; expected one of {SCHEMES}"
            raise ValueError(msg)
        constant = 1.0 if scheme == "cg" else CHI_INVERSE_CONSTANT
        return cls(rho=rho, mode=mode, scheme_constant=constant, rho_0=rho_0)

    def eta(self, params: GrowthParams) -> float:
        """Return ``eta = rho alpha / (gamma - rho alpha)``."""

        return self.rho * params.alpha / (params.gamma - self.rho * params.alpha)

    def kappa(self, params: GrowthParams, norm: float) -> float:
        """Return the ball radius ``kappa_m = eta ||U_{m-1}^-||``."""

        return self.eta(params) * norm


@dataclass(frozen=True)
class Diagnostics:
    """Constants and bounds reported with a blow-up run.

    Only ``upper_bound_continuous`` is available in empirical mode.

    Attributes:
        upper_bound_continuous: ``||u_0||^(1 - beta) / ((beta - 1) delta)``.
        c0: Lower geometric growth constant.
        c1: Upper geometric growth constant.
        upper_bound_discrete: Upper bound of the discrete blow-up time.
        lower_bound_discrete: Lower bound of the accumulated time for the
            executed number of steps.
        varsigma: Amplification ``gamma / (gamma - rho_0 alpha)`` bounding
            ``||U||_inf`` by ``varsigma ||U_{m-1}^-||``.
        mu: Limit of the discrete bound's prefactor as ``rho -> 0``.

    """

    upper_bound_continuous: float
    c0: float | None = None
    c1: float | None = None
    upper_bound_discrete: float | None = None
    lower_bound_discrete: float | None = None
    varsigma: float | None = None
    mu: float | None = None


@dataclass(frozen=True)
class BlowupResult:
    """Outcome of :func:`blowup_run`.

    Attributes:
        t_infinity_estimate: Accumulated time ``sum k_m``.
        steps: Number of computed step sizes.
        norms: ``||U_0^-||, ||U_1^-||, ...`` of the solved steps.
        step_sizes: Every computed ``k_m``.
        nodes: ``t_0 = 0, t_1, ...`` matching ``step_sizes``.
        stopped_by: ``"saturation"`` or ``"tolerance"``.
        diagnostics: Constants and bounds of the run.
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        rho: Step parameter.
        mode: Step-size mode.
        geo_violations: Steps whose growth factor left the geometric bounds.
        ball_violations: Picard iterates outside their ball.
        picard_iterations: Total number of Picard iterations.
        abs_error: ``|estimate - T_inf|`` when the exact time is known.

    """

    t_infinity_estimate: float
    steps: int
    norms: tuple[float, ...]
    step_sizes: tuple[float, ...]
    nodes: tuple[float, ...]
    stopped_by: str
    diagnostics: Diagnostics
    scheme: str = "cg"
    degree: int = 0
    rho: float = 0.0
    mode: str = "empirical"
    geo_violations: int = 0
    ball_violations: int = 0
    picard_iterations: int = 0
    abs_error: float | None = None


def psi(rho: float, params: GrowthParams) -> float:
    """Return ``Psi(rho) = (delta (gamma - rho alpha)^beta - rho alpha gamma^beta) / (gamma - rho alpha)``.

    Args:
        rho: Step parameter in ``[0, gamma / alpha)``.
        params: Growth constants.

    Returns:
        float: Value of the strictly decreasing function ``Psi``.

    Raises:
        ValueError: If ``rho`` lies outside the domain.

    """

    if not 0.0 <= rho < params.rho_pole:
        msg = f"Psi is defined on [0, {params.rho_pole}), received rho={rho}"
        raise ValueError(msg)
    a, b, d, g = params.alpha, params.beta, params.delta, params.gamma
    gap = g - rho * a
    return (d * gap**b - rho * a * g**b) / gap


def psi_root(params: GrowthParams) -> float:
    """Return the unique zero ``rho_bar`` of ``Psi`` by bisection.

    Args:
        params: Growth constants with ``gamma > 0``.

    Returns:
        float: The root, accurate to ``1e-12``.

    Raises:
        ValueError: If ``gamma`` is zero.

    """

    if params.gamma <= 0.0:
        msg = "The root of Psi requires a positive Lipschitz constant gamma"
        raise ValueError(msg)
    upper = params.rho_pole * (1.0 - ROOT_BRACKET_SHRINK)
    return float(optimize.bisect(psi, 0.0, upper, args=(params,), xtol=ROOT_TOLERANCE, maxiter=500))


def default_rho_0(params: GrowthParams) -> float:
    """Return ``0.9 min(1, rho_bar)``, a valid reference parameter."""

    return 0.9 * min(1.0, psi_root(params))


def _check_u0(params: GrowthParams, u0_norm: float) -> None:
    if not u0_norm > params.c_f:
        msg = f"Blow-up analysis needs ||u0|| > c_F, received ||u0||={u0_norm} and c_F={params.c_f}"
        raise GrowthHypothesisError(msg)


def _check_rho_0(params: GrowthParams, rho_0: float | None) -> float:
    if rho_0 is None:
        msg = "Theoretical mode needs a reference parameter rho_0"
        raise GrowthHypothesisError(msg)
    limit = min(1.0, psi_root(params))
    if not 0.0 < rho_0 < limit:
        msg = f"rho_0 must satisfy 0 < rho_0 < min(1, rho_bar) = {limit:.12g}, received {rho_0}"
        raise GrowthHypothesisError(msg)
    return rho_0


def rho_max(params: GrowthParams, u0_norm: float, rho_0: float) -> float:
    """Return the largest admissible ``rho``.

    The value is ``min(rho_0, (gamma / alpha) / (1 + (1 - c_F / ||u0||)^-1))``.

    Args:
        params: Growth constants.
        u0_norm: Norm of the initial value.
        rho_0: Reference parameter.

    Returns:
        float: Upper bound for ``rho`` in theoretical mode.

    Raises:
        GrowthHypothesisError: If ``||u0|| <= c_F`` or ``rho_0`` is invalid.

    """

    _check_u0(params, u0_norm)
    _check_rho_0(params, rho_0)
    second = params.rho_pole / (1.0 + 1.0 / (1.0 - params.c_f / u0_norm))
    return min(rho_0, second)


def validate_plan(plan: StepPlan, params: GrowthParams, u0_norm: float) -> None:
    """Check that ``plan`` is admissible for ``params`` and the initial norm.

    Args:
        plan: Step-size rule.
        params: Growth constants.
        u0_norm: Norm of the initial value.

    Returns:
        None: This function does not return a value.

    Raises:
        GrowthHypothesisError: If ``||u0|| <= c_F`` or, in theoretical mode,
            ``rho`` exceeds :func:`rho_max`.

    """

    _check_u0(params, u0_norm)
    if plan.mode == "empirical":
        return
    bound = rho_max(params, u0_norm, _check_rho_0(params, plan.rho_0))
    if plan.rho > bound:
        msg = (
            f"rho={plan.rho} exceeds the admissible bound "
            f"min(rho_0, (gamma/alpha)/(1 + (1 - c_F/||u0||)^-1)) = {bound:.12g}"
        )
        raise GrowthHypothesisError(msg)


def step_size(plan: StepPlan, params: GrowthParams, prev_norm: float) -> float:
    """Return the step length ``k_m`` for the previous norm ``||U_{m-1}^-||``.

    Theoretical mode uses ``c^-1 gamma^-beta rho (gamma - rho alpha)^(beta - 1)
    ||U||^(1 - beta)``; empirical mode uses ``rho ||U||^(1 - beta)``.

    Args:
        plan: Step-size rule.
        params: Growth constants.
        prev_norm: Positive norm of the previous left-sided value.

    Returns:
        float: The step length.

    Raises:
        ValueError: If ``prev_norm`` is not positive or ``rho alpha >= gamma``
            in theoretical mode.

    """

    if not prev_norm > 0.0:
        msg = f"The step rule needs a positive previous norm, received {prev_norm}"
        raise ValueError(msg)
    scaling = prev_norm ** (1.0 - params.beta)
    if plan.mode == "empirical":
        return plan.rho * scaling
    gap = params.gamma - plan.rho * params.alpha
    if gap <= 0.0:
        msg = f"Theoretical steps need rho < gamma/alpha = {params.rho_pole}, received {plan.rho}"
        raise ValueError(msg)
    return plan.rho * gap ** (params.beta - 1.0) * scaling / (plan.scheme_constant * params.gamma**params.beta)


def continuous_upper_bound(params: GrowthParams, u0_norm: float) -> float:
    """Return ``||u0||^(1 - beta) / ((beta - 1) delta)``, an upper bound of the blow-up time.

    Raises:
        GrowthHypothesisError: If ``||u0|| <= c_F``.

    """

    _check_u0(params, u0_norm)
    return u0_norm ** (1.0 - params.beta) / ((params.beta - 1.0) * params.delta)


def _prefactor(params: GrowthParams, plan: StepPlan) -> float:
    a, b, g = params.alpha, params.beta, params.gamma
    return plan.rho * (g - a * plan.rho) ** (b - 1.0) / (plan.scheme_constant * g**b)


def discrete_lower_time(params: GrowthParams, plan: StepPlan, u0_norm: float, steps: int, c1: float) -> float:
    """Return the lower bound of ``t_steps`` from the upper growth factor ``1 + C1 rho``.

    Args:
        params: Growth constants.
        plan: Theoretical step-size rule.
        u0_norm: Norm of the initial value.
        steps: Number of accumulated step sizes.
        c1: Upper growth constant.

    Returns:
        float: ``prefactor ||u0||^(1 - beta) sum_{j < steps} (1 + C1 rho)^((1 - beta) j)``.

    """

    ratio = (1.0 + c1 * plan.rho) ** (1.0 - params.beta)
    geometric = steps if ratio == 1.0 else (1.0 - ratio**steps) / (1.0 - ratio)
    return _prefactor(params, plan) * u0_norm ** (1.0 - params.beta) * geometric


def discrete_diagnostics(params: GrowthParams, plan: StepPlan, u0_norm: float) -> Diagnostics:
    """Return the growth constants and the discrete blow-up time bound.

    Args:
        params: Growth constants.
        plan: Theoretical step-size rule with a valid ``rho_0``.
        u0_norm: Norm of the initial value.

    Returns:
        Diagnostics: ``C0 = Psi(rho_0) / (c gamma^beta)``,
        ``C1 = alpha (rho_0 + 1) / (c (gamma - rho_0 alpha))`` and the bounds.

    Raises:
        GrowthHypothesisError: If ``rho_0`` or the initial norm are invalid.

    """

    rho_0 = _check_rho_0(params, plan.rho_0)
    continuous = continuous_upper_bound(params, u0_norm)
    a, b, g, c = params.alpha, params.beta, params.gamma, plan.scheme_constant
    c0 = psi(rho_0, params) / (c * g**b)
    c1 = a * (rho_0 + 1.0) / (c * (g - rho_0 * a))
    upper = _prefactor(params, plan) * u0_norm ** (1.0 - b) / (1.0 - (1.0 + c0 * plan.rho) ** (1.0 - b))
    return Diagnostics(
        upper_bound_continuous=continuous,
        c0=c0,
        c1=c1,
        upper_bound_discrete=upper,
        varsigma=g / (g - rho_0 * a),
        mu=1.0 / (c * g * c0 * (b - 1.0)),
    )


def exact_error(estimate: float, t_exact: float) -> float:
    """Return the absolute blow-up time error ``|estimate - t_exact|``."""

    return abs(estimate - t_exact)


def blowup_run(
    problem: Problem,
    params: GrowthParams,
    plan: StepPlan,
    scheme: str,
    degree: int,
    cfg: SolverConfig | None = None,
    tau: float = 0.0,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> BlowupResult:
    """Approximate the blow-up time by marching with norm-adapted steps.

    Each iteration computes ``k_m`` from ``||U_{m-1}^-||`` and adds it to the
    running time. The loop stops when adding ``k_m`` no longer changes the
    running time in floating point, or when ``k_m <= tau``; otherwise the cG
    or dG solution on the new step is computed.

    Args:
        problem: Initial value problem.
        params: Growth constants of ``problem.rhs``.
        plan: Step-size rule.
        scheme: ``"cg"`` or ``"dg"``.
        degree: Polynomial degree ``r``.
        cfg: Solver settings.
        tau: Step-size threshold; ``0`` leaves only the saturation criterion.
        max_steps: Safety limit on the number of steps.

    Returns:
        BlowupResult: Estimate, per-step history, and diagnostics.

    Raises:
        GrowthHypothesisError: If the hypotheses are violated or no blow-up
            is observed within ``max_steps`` steps.
        NonConvergenceError: With ``interval_index`` set when a step fails.

    """

    if scheme not in SCHEMES:
        msg = f"Unknown scheme {scheme!r}; expected one of {SCHEMES}"
        raise ValueError(msg)
    cfg = cfg or SolverConfig()
    value = np.atleast_1d(np.asarray(problem.u0, dtype=float))
    norm = float(np.linalg.norm(value))
    validate_plan(plan, params, norm)
    theoretical = plan.mode == "theoretical"
    diagnostics = (
        discrete_diagnostics(params, plan, norm)
        if theoretical
        else Diagnostics(upper_bound_continuous=continuous_upper_bound(params, norm))
    )
    solve = cg_step if scheme == "cg" else dg_step
    lower_factor = 1.0 + (diagnostics.c0 or 0.0) * plan.rho
    upper_factor = 1.0 + (diagnostics.c1 or 0.0) * plan.rho

    elapsed = 0.0
    norms = [norm]
    step_sizes: list[float] = []
    nodes = [0.0]
    geo_violations = 0
    ball_violations = 0
    iterations = 0
    stopped_by = "saturation"
    for index in range(max_steps):
        k = step_size(plan, params, norm)
        if elapsed + k == elapsed:
            stopped_by = "saturation"
            break
        start = elapsed
        elapsed += k
        step_sizes.append(k)
        nodes.append(elapsed)
        if k <= tau:
            stopped_by = "tolerance"
            break
        kappa = plan.kappa(params, norm) if theoretical else None
        try:
            result = solve(problem, value, IntervalMap(t_start=start, k=k), degree, cfg, kappa=kappa)
        except NonConvergenceError as error:
            raise NonConvergenceError(error.iterations, error.last_delta, interval_index=index) from error
        iterations += result.iterations
        ball_violations += result.ball_violations
        new_norm = float(np.linalg.norm(result.right_value))
        if theoretical:
            ratio = new_norm / norm
            slack = 1e-12 * ratio
            if ratio < lower_factor - slack or ratio > upper_factor + slack:
                geo_violations += 1
                warnings.warn(
                    f"Step {index}: growth factor {ratio:.15g} outside [{lower_factor:.15g}, {upper_factor:.15g}]",
                    GrowthBoundWarning,
                    stacklevel=2,
                )
        value, norm = result.right_value, new_norm
        norms.append(norm)
    else:
        msg = f"No blow-up detected within {max_steps} steps; check the growth hypotheses"
        raise GrowthHypothesisError(msg)

    if theoretical and diagnostics.c1 is not None:
        lower = discrete_lower_time(params, plan, norms[0], len(step_sizes), diagnostics.c1)
        diagnostics = replace(diagnostics, lower_bound_discrete=lower)
    abs_error = None if problem.t_blowup_exact is None else exact_error(elapsed, problem.t_blowup_exact)
    logger.info(
        "%s r=%d rho=%.6g (%s): T_inf ~ %.17g after %d steps, stopped by %s",
        scheme,
        degree,
        plan.rho,
        plan.mode,
        elapsed,
        len(step_sizes),
        stopped_by,
    )
    return BlowupResult(
        t_infinity_estimate=elapsed,
        steps=len(step_sizes),
        norms=tuple(norms),
        step_sizes=tuple(step_sizes),
        nodes=tuple(nodes),
        stopped_by=stopped_by,
        diagnostics=diagnostics,
        scheme=scheme,
        degree=degree,
        rho=plan.rho,
        mode=plan.mode,
        geo_violations=geo_violations,
        ball_violations=ball_violations,
        picard_iterations=iterations,
        abs_error=abs_error,
    )
