"""Provide reference-interval machinery for Legendre-based time stepping.

The helpers in this module evaluate Legendre polynomials normalised so that
``K_i(1) = 1`` and ``K_i(-1) = (-1)**i``, build Gauss-Legendre rules on the
reference interval ``(-1, 1)``, and describe the affine map between the
reference interval and a physical time step. Everything here is pure and
immutable, so values can be shared freely between threads and processes.

"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

REFERENCE_LENGTH: float = 2.0
"""Length of the reference interval ``(-1, 1)``."""


@dataclass(frozen=True)
class QuadRule:
    """Gauss-Legendre quadrature rule on the reference interval.

    Attributes:
        nodes: Strictly increasing nodes in ``(-1, 1)``.
        weights: Positive weights summing to ``2``.

    """

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        """Return the number of quadrature points.

        Returns:
            int: Number of nodes in the rule.

        """

        return int(self.nodes.shape[0])


@dataclass(frozen=True)
class IntervalMap:
    """Affine map from the reference interval onto ``[t_start, t_start + k]``.

    Attributes:
        t_start: Left end point of the time step.
        k: Positive step length.

    """

    t_start: float
    k: float

    def __post_init__(self) -> None:
        """Validate the step length.

        Returns:
            None: This method does not return a value.

        Raises:
            ValueError: If ``k`` is not a positive finite number.

        """

        if not np.isfinite(self.k) or self.k <= 0.0:
            msg = f"Step length must be positive and finite, received {self.k}"
            raise ValueError(msg)
        if not np.isfinite(self.t_start):
            msg = f"Interval start must be finite, received {self.t_start}"
            raise ValueError(msg)

    @property
    def t_end(self) -> float:
        """Return the right end point ``t_start + k``."""

        return self.t_start + self.k

    def contains(self, t: float) -> bool:
        """Return whether ``t`` lies in the closed interval."""

        return self.t_start <= t <= self.t_end


def legendre_eval(i: int, x_hat: float | np.ndarray) -> float | np.ndarray:
    """Return the Legendre polynomial of degree ``i`` at ``x_hat``.

    Args:
        i: Non-negative polynomial degree.
        x_hat: Point or array of points in ``[-1, 1]``.

    Returns:
        float | numpy.ndarray: Value(s) of ``K_i`` with the same shape as
        ``x_hat``.

    Raises:
        ValueError: If ``i`` is negative or a point lies outside ``[-1, 1]``.

    """

    if i < 0:
        msg = f"Legendre degree must be non-negative, received {i}"
        raise ValueError(msg)
    points = np.asarray(x_hat, dtype=float)
    if np.any(np.abs(points) > 1.0):
        msg = "Legendre polynomials are evaluated on the reference interval [-1, 1]"
        raise ValueError(msg)
    values = legendre_vandermonde(points.ravel(), i)[:, i].reshape(points.shape)
    if values.ndim == 0:
        return float(values)
    return values


def legendre_vandermonde(x_hat: np.ndarray, degree: int) -> np.ndarray:
    """Return the matrix ``V[q, i] = K_i(x_hat[q])`` for ``i <= degree``.

    The columns follow the three-term recurrence, so ``K_i(-1)`` is exactly
    ``(-1)**i`` in floating point.

    Args:
        x_hat: One-dimensional array of reference points.
        degree: Highest polynomial degree.

    Returns:
        numpy.ndarray: Array of shape ``(len(x_hat), degree + 1)``.

    """

    return npleg.legvander(np.asarray(x_hat, dtype=float), degree)


@lru_cache(maxsize=128)
def gauss_rule(n: int) -> QuadRule:
    """Return the ``n``-point Gauss-Legendre rule on ``(-1, 1)``.

    Rules are cached per ``n`` and returned as read-only arrays.

    Args:
        n: Positive number of nodes.

    Returns:
        QuadRule: Rule exact for polynomials of degree ``2n - 1``.

    Raises:
        ValueError: If ``n`` is not positive.

    """

    if n < 1:
        msg = f"Quadrature rules need at least one node, received {n}"
        raise ValueError(msg)
    nodes, weights = npleg.leggauss(n)
    # leggauss returns nodes in ascending order; symmetrise against round-off
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(nodes=nodes, weights=weights)


@lru_cache(maxsize=128)
def chebyshev_lobatto(count: int) -> np.ndarray:
    """Return ``count`` Chebyshev-Lobatto points on ``[-1, 1]`` in ascending order.

    Args:
        count: Number of points, at least two so both end points are present.

    Returns:
        numpy.ndarray: Read-only array starting at ``-1`` and ending at ``1``.

    Raises:
        ValueError: If ``count`` is smaller than two.

    """

    if count < 2:
        msg = f"Chebyshev-Lobatto grids need at least two points, received {count}"
        raise ValueError(msg)
    points = -np.cos(np.pi * np.arange(count) / (count - 1))
    points[0], points[-1] = -1.0, 1.0
    points.setflags(write=False)
    return points


def map_to_interval(interval: IntervalMap, x_hat: float | np.ndarray) -> float | np.ndarray:
    """Map reference point(s) ``x_hat`` to physical time.

    The end points are mapped exactly: ``-1`` to ``t_start`` and ``1`` to
    ``t_start + k``.

    Args:
        interval: Affine map of the time step.
        x_hat: Reference point or array of points.

    Returns:
        float | numpy.ndarray: Physical time(s).

    """

    points = np.asarray(x_hat, dtype=float)
    times = interval.t_start + 0.5 * interval.k * (points + 1.0)
    times = np.where(points == 1.0, interval.t_end, times)
    if times.ndim == 0:
        return float(times)
    return times


def map_to_reference(interval: IntervalMap, t: float | np.ndarray) -> float | np.ndarray:
    """Map physical time(s) ``t`` back to the reference interval.

    Args:
        interval: Affine map of the time step.
        t: Time or array of times inside the closed interval.

    Returns:
        float | numpy.ndarray: Reference point(s) in ``[-1, 1]``.

    Raises:
        ValueError: If a time lies outside ``[t_start, t_start + k]``.

    """

    times = np.asarray(t, dtype=float)
    if np.any(times < interval.t_start) or np.any(times > interval.t_end):
        msg = f"Time outside the interval [{interval.t_start}, {interval.t_end}]"
        raise ValueError(msg)
    points = 2.0 * (times - interval.t_start) / interval.k - 1.0
    points = np.clip(points, -1.0, 1.0)
    points = np.where(times == interval.t_end, 1.0, points)
    if points.ndim == 0:
        return float(points)
    return points
