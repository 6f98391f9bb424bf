"""Define the initial value problems shipped with the package.

A :class:`Problem` bundles the right-hand side ``F(t, x)``, the initial value,
and optional exact data: a closed-form solution, the exact blow-up time, and
the growth constants needed by :mod:`galerkin_blowup.blowup`. Right-hand sides
broadcast over leading axes: ``t`` of shape ``(...)`` and ``x`` of shape
``(..., N)`` give values of shape ``(..., N)``, so a whole quadrature rule is
evaluated in one call.

"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .blowup import GrowthParams

RightHandSide = Callable[[np.ndarray, np.ndarray], np.ndarray]
"""Vectorised right-hand side ``F(t, x)``."""

ExactSolution = Callable[[np.ndarray], np.ndarray]
"""Exact solution ``t -> u(t)`` returning shape ``(..., N)``."""


@dataclass(frozen=True, eq=False)
class Problem:
    """Initial value problem ``u' = F(t, u)``, ``u(0) = u0`` in ``R^N``.

    Attributes:
        name: Registry name.
        rhs: Vectorised right-hand side.
        u0: Initial value of shape ``(N,)``.
        exact: Optional exact solution.
        t_blowup_exact: Optional exact blow-up time.
        growth: Optional growth constants of ``rhs``.
        params: Construction parameters, kept for reporting and rebuilding.

    """

    name: str
    rhs: RightHandSide
    u0: np.ndarray
    exact: ExactSolution | None = None
    t_blowup_exact: float | None = None
    growth: GrowthParams | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Freeze the initial value as a one-dimensional array.

        Returns:
            None: This method does not return a value.

        """

        u0 = np.array(np.atleast_1d(self.u0), dtype=float)
        if u0.ndim != 1:
            msg = f"Initial value must be a vector, received shape {u0.shape}"
            raise ValueError(msg)
        u0.setflags(write=False)
        object.__setattr__(self, "u0", u0)

    @property
    def dim(self) -> int:
        """Return the dimension ``N`` of the state space."""

        return int(self.u0.shape[0])


def _as_state(t: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    times = np.asarray(t, dtype=float)
    states = np.asarray(x, dtype=float)
    return times[..., None], states


def example_blowup(u0: float = 3.0) -> Problem:
    """Return ``u' = (|u| + 1) u / (1 + exp(-t))``, ``u(0) = u0``.

    With ``a = |u0| / (2 (|u0| + 1))`` the exact solution is
    ``sign(u0) a (e^t + 1) / (1 - a (e^t + 1))``, which blows up at
    ``ln(1 + 2 / |u0|)``; the default ``u0 = 3`` gives
    ``3 (e^t + 1) / (5 - 3 e^t)`` and ``ln(5/3)``. With ``c_F = 2`` the growth
    constants are ``alpha = 3/2``, ``beta = 2``, ``delta = 1/2``,
    ``gamma = 5/2``, and the ball Lipschitz constant is 5. The blow-up
    hypotheses need ``|u0| > 2``.

    Args:
        u0: Scalar initial value.

    Returns:
        Problem: The scalar blow-up benchmark.

    Raises:
        ValueError: If ``u0`` is not finite.

    """

    start = float(u0)
    if not math.isfinite(start):
        msg = f"Initial value must be finite, received {u0}"
        raise ValueError(msg)
    scale = abs(start) / (2.0 * (abs(start) + 1.0))

    def rhs(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        times, states = _as_state(t, x)
        return (np.abs(states) + 1.0) * states / (1.0 + np.exp(-times))

    def exact(t: np.ndarray) -> np.ndarray:
        ratio = scale * (np.exp(np.asarray(t, dtype=float)) + 1.0)[..., None]
        return math.copysign(1.0, start) * ratio / (1.0 - ratio)

    return Problem(
        name="example54",
        rhs=rhs,
        u0=np.array([start]),
        exact=exact,
        t_blowup_exact=math.log((abs(start) + 2.0) / abs(start)) if start != 0.0 else None,
        growth=GrowthParams(alpha=1.5, beta=2.0, delta=0.5, c_f=2.0, gamma=2.5, l_cf=5.0),
        params={"u0": start},
    )


def linear_test(lam: float, u0: float | np.ndarray = 1.0, dim: int | None = None) -> Problem:
    """Return ``u' = lam u`` with exact solution ``exp(lam t) u0``.

    Args:
        lam: Growth rate.
        u0: Scalar or vector initial value.
        dim: Optional dimension; a scalar ``u0`` is repeated ``dim`` times.

    Returns:
        Problem: Linear verification problem.

    Raises:
        ValueError: If ``dim`` is not positive or disagrees with ``u0``.

    """

    initial = np.atleast_1d(np.asarray(u0, dtype=float))
    if dim is not None:
        if dim < 1:
            msg = f"Dimension must be positive, received {dim}"
            raise ValueError(msg)
        if initial.shape[0] == 1:
            initial = np.full(dim, initial[0])
        elif initial.shape[0] != dim:
            msg = f"Initial value has {initial.shape[0]} components, expected {dim}"
            raise ValueError(msg)

    def rhs(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        _, states = _as_state(t, x)
        return lam * states

    def exact(t: np.ndarray) -> np.ndarray:
        return np.exp(lam * np.asarray(t, dtype=float))[..., None] * initial

    return Problem(name="linear", rhs=rhs, u0=initial, exact=exact, params={"lam": lam, "dim": initial.shape[0]})


def power_law(alpha: float, beta: float, u0: float = 1.0) -> Problem:
    """Return ``u' = alpha |u|^(beta - 1) u`` with its closed-form blow-up.

    The solution is ``sign(u0) (|u0|^(1 - beta) - (beta - 1) alpha t)^(1 / (1 - beta))``
    and blows up at ``|u0|^(1 - beta) / ((beta - 1) alpha)``. The growth
    bounds hold with ``delta = alpha`` and ``c_F = 0``; the Lipschitz constant
    is ``gamma = alpha beta``.

    Args:
        alpha: Positive growth constant.
        beta: Exponent larger than one.
        u0: Non-zero scalar initial value.

    Returns:
        Problem: Power-law blow-up problem.

    Raises:
        ValueError: If ``beta <= 1``, ``alpha <= 0`` or ``u0 == 0``.

    """

    if beta <= 1.0:
        msg = f"Power-law blow-up needs beta > 1, received {beta}"
        raise ValueError(msg)
    if alpha <= 0.0:
        msg = f"Power-law blow-up needs alpha > 0, received {alpha}"
        raise ValueError(msg)
    if u0 == 0.0:
        msg = "Power-law blow-up needs a non-zero initial value"
        raise ValueError(msg)
    magnitude = abs(u0)
    sign = math.copysign(1.0, u0)
    t_blowup = magnitude ** (1.0 - beta) / ((beta - 1.0) * alpha)

    def rhs(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        _, states = _as_state(t, x)
        return alpha * np.abs(states) ** (beta - 1.0) * states

    def exact(t: np.ndarray) -> np.ndarray:
        times = np.asarray(t, dtype=float)
        base = magnitude ** (1.0 - beta) - (beta - 1.0) * alpha * times
        return np.asarray(sign * base ** (1.0 / (1.0 - beta)))[..., None]

    return Problem(
        name="powerlaw",
        rhs=rhs,
        u0=np.array([u0]),
        exact=exact,
        t_blowup_exact=t_blowup,
        growth=GrowthParams(alpha=alpha, beta=beta, delta=alpha, c_f=0.0, gamma=alpha * beta, l_cf=0.0),
        params={"alpha": alpha, "beta": beta, "u0": u0},
    )


def clip_radial(f: RightHandSide, radius: float) -> RightHandSide:
    """Return ``G(t, x) = f(t, x)`` inside the ball and ``f(t, M x / ||x||)`` outside.

    If ``f`` is Lipschitz with constant ``L_M`` on the closed ball of radius
    ``M``, then ``G`` is globally Lipschitz with the same constant. Inside the
    ball the state is passed to ``f`` unchanged.

    Args:
        f: Vectorised right-hand side.
        radius: Ball radius ``M > 0``.

    Returns:
        RightHandSide: The clipped right-hand side.

    Raises:
        ValueError: If ``radius`` is not positive.

    """

    if not radius > 0.0:
        msg = f"Clipping radius must be positive, received {radius}"
        raise ValueError(msg)

    def clipped(t: np.ndarray, x: np.ndarray) -> np.ndarray:
        states = np.asarray(x, dtype=float)
        norms = np.linalg.norm(states, axis=-1, keepdims=True)
        # radius / radius is exactly one, so states inside the ball are untouched
        scale = radius / np.maximum(norms, radius)
        return f(t, states * scale)

    return clipped


def clipped(problem: Problem, radius: float) -> Problem:
    """Return ``problem`` with its right-hand side clipped to the ball of ``radius``.

    Growth data are dropped because clipping removes the blow-up.

    """

    return Problem(
        name=f"{problem.name}-clipped",
        rhs=clip_radial(problem.rhs, radius),
        u0=problem.u0,
        params={**problem.params, "clip": radius},
    )


PROBLEMS: dict[str, Callable[..., Problem]] = {
    "example54": example_blowup,
    "linear": linear_test,
    "powerlaw": power_law,
}
"""Problem factories addressable by name from the command line."""


def build_problem(name: str, clip: float | None = None, **params: Any) -> Problem:
    """Return the registered problem ``name`` built with ``params``.

    Args:
        name: Registry key (``example54``, ``linear`` or ``powerlaw``).
        clip: Optional clipping radius applied with :func:`clip_radial`.
        **params: Keyword arguments of the factory; ``None`` values are
            ignored so factory defaults apply.

    Returns:
        Problem: The constructed problem.

    Raises:
        ValueError: If the name or a parameter is unknown.

    """

    if name not in PROBLEMS:
        msg = f"Unknown problem {name!r}; choose from {sorted(PROBLEMS)}"
        raise ValueError(msg)
    arguments = {key: value for key, value in params.items() if value is not None}
    try:
        problem = PROBLEMS[name](**arguments)
    except TypeError as error:
        msg = f"Invalid parameters for problem {name!r}: {sorted(arguments)}"
        raise ValueError(msg) from error
    if clip is not None:
        problem = clipped(problem, clip)
    return problem
