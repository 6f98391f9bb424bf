"""Represent vector-valued polynomial trajectories on a single time step.

A :class:`PolyTraj` stores the discrete solution piece ``U`` on one interval
``I_m`` as Legendre coefficients: row ``i`` of ``coeffs`` is the vector that
multiplies ``K_i`` composed with the inverse interval map. The module provides
evaluation, differentiation, antiderivatives, the L2 projection onto
polynomials of a given degree, and norm estimates used by the step solvers.

"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from numpy.polynomial import legendre as npleg

from .legendre import (
    IntervalMap,
    QuadRule,
    chebyshev_lobatto,
    gauss_rule,
    legendre_vandermonde,
    map_to_interval,
    map_to_reference,
)

TimeFunction = Callable[[np.ndarray], np.ndarray]
"""Callable mapping an array of times of shape ``(q,)`` to values ``(q, N)``."""


@dataclass(frozen=True)
class NormEstimate:
    """Sampled estimate of the maximum norm of a trajectory.

    Attributes:
        value: Largest sampled Euclidean norm.
        sample_count: Number of sampled time points.

    """

    value: float
    sample_count: int


@dataclass(frozen=True)
class PolyTraj:
    """Vector-valued polynomial on one time interval in the Legendre basis.

    Attributes:
        interval: Affine map describing the time step.
        degree: Polynomial degree ``r``.
        coeffs: Array of shape ``(r + 1, N)`` holding the vector coefficient
            of each Legendre polynomial.
        left_anchor: Optional exact value at the left end point. When set,
            evaluation at ``t_start`` returns it unchanged instead of the
            Legendre sum.

    """

    interval: IntervalMap
    degree: int
    coeffs: np.ndarray
    left_anchor: np.ndarray | None = None

    def __post_init__(self) -> None:
        """Validate the coefficient layout.

        Returns:
            None: This method does not return a value.

        Raises:
            ValueError: If ``coeffs`` does not have ``degree + 1`` rows or the anchor
                does not match the dimension.

        """

        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.ndim != 2:
            msg = f"Coefficients must be a 2D array, received shape {coeffs.shape}"
            raise ValueError(msg)
        if self.degree < 0 or coeffs.shape[0] != self.degree + 1:
            msg = f"Degree {self.degree} needs {self.degree + 1} coefficient rows, received {coeffs.shape[0]}"
            raise ValueError(msg)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        if self.left_anchor is not None:
            anchor = np.array(self.left_anchor, dtype=float).reshape(-1)
            if anchor.shape[0] != coeffs.shape[1]:
                msg = f"Left anchor has {anchor.shape[0]} components, expected {coeffs.shape[1]}"
                raise ValueError(msg)
            anchor.setflags(write=False)
            object.__setattr__(self, "left_anchor", anchor)

    @classmethod
    def constant(cls, value: np.ndarray, interval: IntervalMap, degree: int = 0) -> PolyTraj:
        """Return the constant trajectory ``t -> value`` stored with ``degree``.

        Args:
            value: Constant vector.
            interval: Time step of the trajectory.
            degree: Storage degree; higher rows are zero.

        Returns:
            PolyTraj: Constant trajectory.

        """

        vector = np.atleast_1d(np.asarray(value, dtype=float))
        coeffs = np.zeros((degree + 1, vector.shape[0]))
        coeffs[0] = vector
        return cls(interval=interval, degree=degree, coeffs=coeffs)

    @classmethod
    def zeros(cls, dim: int, interval: IntervalMap, degree: int = 0) -> PolyTraj:
        """Return the zero trajectory of dimension ``dim``.

        Args:
            dim: Dimension ``N`` of the values.
            interval: Time step of the trajectory.
            degree: Storage degree.

        Returns:
            PolyTraj: Trajectory with all coefficients zero.

        """

        return cls(interval=interval, degree=degree, coeffs=np.zeros((degree + 1, dim)))

    @property
    def dim(self) -> int:
        """Return the dimension ``N`` of the trajectory values."""

        return int(self.coeffs.shape[1])

    @property
    def left_value(self) -> np.ndarray:
        """Return the value at the left end point (``U_{m-1}^+``)."""

        if self.left_anchor is not None:
            return self.left_anchor.copy()
        signs = (-1.0) ** np.arange(self.degree + 1)
        return signs @ self.coeffs

    @property
    def right_value(self) -> np.ndarray:
        """Return the value at the right end point (``U_m^-``)."""

        return self.coeffs.sum(axis=0)

    def eval(self, t: float | np.ndarray) -> np.ndarray:
        """Evaluate the trajectory at physical time(s) ``t``.

        Args:
            t: Time or one-dimensional array of times in the closed interval.

        Returns:
            numpy.ndarray: Vector of shape ``(N,)`` for scalar input, otherwise
            an array of shape ``(len(t), N)``.

        Raises:
            ValueError: If a time lies outside the interval.

        """

        x_hat = np.asarray(map_to_reference(self.interval, t), dtype=float)
        values = self.eval_reference(np.atleast_1d(x_hat))
        if x_hat.ndim == 0:
            return values[0]
        return values

    def eval_reference(self, x_hat: np.ndarray) -> np.ndarray:
        """Evaluate at reference points without mapping from physical time.

        Args:
            x_hat: One-dimensional array of points in ``[-1, 1]``.

        Returns:
            numpy.ndarray: Values of shape ``(len(x_hat), N)``.

        """

        points = np.asarray(x_hat, dtype=float)
        values = legendre_vandermonde(points, self.degree) @ self.coeffs
        if self.left_anchor is not None:
            values[points == -1.0] = self.left_anchor
        return values

    def anchored(self, value: np.ndarray) -> PolyTraj:
        """Return a copy whose value at ``t_start`` is exactly ``value``.

        The coefficients are unchanged; ``value`` should agree with the
        Legendre sum at the left end point up to rounding.

        Args:
            value: Exact left end value of shape ``(N,)``.

        Returns:
            PolyTraj: Anchored copy.

        """

        return replace(self, left_anchor=value)

    def with_degree(self, degree: int) -> PolyTraj:
        """Return the same polynomial stored with a higher ``degree``.

        Args:
            degree: Target degree, not smaller than the current one.

        Returns:
            PolyTraj: Zero-padded copy.

        Raises:
            ValueError: If ``degree`` would truncate the polynomial.

        """

        if degree < self.degree:
            msg = f"Cannot store a degree {self.degree} polynomial with degree {degree}"
            raise ValueError(msg)
        coeffs = np.zeros((degree + 1, self.dim))
        coeffs[: self.degree + 1] = self.coeffs
        return PolyTraj(interval=self.interval, degree=degree, coeffs=coeffs)

    def _aligned(self, other: PolyTraj) -> tuple[np.ndarray, np.ndarray, int]:
        """Return both coefficient arrays padded to a common degree.

        Args:
            other: Second operand on the same interval.

        Returns:
            tuple[numpy.ndarray, numpy.ndarray, int]: Padded coefficients of
            ``self`` and ``other`` and the common degree.

        Raises:
            ValueError: If the intervals differ.

        """

        if other.interval != self.interval:
            msg = "Trajectories live on different intervals"
            raise ValueError(msg)
        degree = max(self.degree, other.degree)
        return self.with_degree(degree).coeffs, other.with_degree(degree).coeffs, degree

    def __add__(self, other: PolyTraj) -> PolyTraj:
        left, right, degree = self._aligned(other)
        return PolyTraj(interval=self.interval, degree=degree, coeffs=left + right)

    def __sub__(self, other: PolyTraj) -> PolyTraj:
        left, right, degree = self._aligned(other)
        return PolyTraj(interval=self.interval, degree=degree, coeffs=left - right)

    def __mul__(self, scalar: float) -> PolyTraj:
        return PolyTraj(interval=self.interval, degree=self.degree, coeffs=float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def to_dict(self) -> dict[str, Any]:
        """Return a JSON-ready dictionary ``{t_start, k, degree, coeffs}``.

        Returns:
            dict[str, Any]: Serialisable representation with row-major
            coefficients.

        """

        return {
            "t_start": self.interval.t_start,
            "k": self.interval.k,
            "degree": self.degree,
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> PolyTraj:
        """Rebuild a trajectory from :meth:`to_dict` output.

        Args:
            data: Dictionary with ``t_start``, ``k``, ``degree`` and ``coeffs``.

        Returns:
            PolyTraj: Trajectory with the stored coefficients.

        Raises:
            KeyError: If a field is missing.
            ValueError: If the coefficient layout does not match the degree.

        """

        interval = IntervalMap(t_start=float(data["t_start"]), k=float(data["k"]))
        return cls(interval=interval, degree=int(data["degree"]), coeffs=np.asarray(data["coeffs"], dtype=float))


def derivative(p: PolyTraj) -> PolyTraj:
    """Return the time derivative of ``p``.

    The chain-rule factor ``2 / k`` is applied. A constant trajectory yields
    the zero trajectory of degree ``0``.

    Args:
        p: Trajectory to differentiate.

    Returns:
        PolyTraj: Derivative of degree ``max(r - 1, 0)``.

    """

    coeffs = npleg.legder(p.coeffs, m=1, scl=2.0 / p.interval.k, axis=0)
    return PolyTraj(interval=p.interval, degree=coeffs.shape[0] - 1, coeffs=coeffs)


def antiderivative_from_left(p: PolyTraj) -> PolyTraj:
    """Return ``t -> integral of p from t_start to t``.

    Args:
        p: Trajectory to integrate.

    Returns:
        PolyTraj: Antiderivative of degree ``r + 1`` vanishing at ``t_start``.

    """

    integrated = npleg.legint(p.coeffs, m=1, lbnd=-1.0, scl=0.5 * p.interval.k, axis=0)
    # legint leaves a single all-zero row unextended
    coeffs = np.zeros((p.degree + 2, p.dim))
    coeffs[: integrated.shape[0]] = integrated
    return PolyTraj(interval=p.interval, degree=p.degree + 1, coeffs=coeffs)


@lru_cache(maxsize=256)
def _projection_matrix(n: int, degree: int) -> np.ndarray:
    """Return ``P`` with ``coeffs = P @ values`` for values at the ``n`` Gauss nodes."""

    rule = gauss_rule(n)
    vander = legendre_vandermonde(rule.nodes, degree)
    scale = 0.5 * (2.0 * np.arange(degree + 1) + 1.0)
    matrix = scale[:, None] * (vander * rule.weights[:, None]).T
    matrix.setflags(write=False)
    return matrix


def project_values(values: np.ndarray, interval: IntervalMap, degree: int, quad: QuadRule) -> PolyTraj:
    """Return the L2 projection given function values at the quadrature nodes.

    Args:
        values: Array of shape ``(quad.size, N)`` sampled at the mapped nodes.
        interval: Time step of the projection.
        degree: Target polynomial degree ``r``.
        quad: Gauss rule the values were sampled on.

    Returns:
        PolyTraj: Projection of degree ``degree``.

    Raises:
        ValueError: If the rule has fewer than ``degree + 1`` nodes.

    """

    if quad.size < degree + 1:
        msg = f"A degree {degree} projection needs at least {degree + 1} quadrature nodes, received {quad.size}"
        raise ValueError(msg)
    samples = np.asarray(values, dtype=float).reshape(quad.size, -1)
    coeffs = _projection_matrix(quad.size, degree) @ samples
    return PolyTraj(interval=interval, degree=degree, coeffs=coeffs)


def project_l2(f: TimeFunction, interval: IntervalMap, degree: int, quad: QuadRule) -> PolyTraj:
    """Return the L2 projection of ``f`` onto polynomials of ``degree``.

    Coefficient ``i`` is ``(2i + 1) / 2 * sum_q w_q f(F(x_q)) K_i(x_q)``; the
    result is exact when ``f`` is a polynomial of degree at most
    ``2 n - 1 - degree``.

    Args:
        f: Callable evaluated on an array of physical times.
        interval: Time step of the projection.
        degree: Target polynomial degree ``r``.
        quad: Gauss rule with at least ``degree + 1`` nodes.

    Returns:
        PolyTraj: Projection of degree ``degree``.

    """

    times = np.asarray(map_to_interval(interval, quad.nodes))
    values = np.asarray(f(times), dtype=float).reshape(quad.size, -1)
    return project_values(values, interval, degree, quad)


def sample_count(degree: int) -> int:
    """Return the size ``4 (r + 1) + 1`` of the Chebyshev sample grid."""

    return 4 * (degree + 1) + 1


def sample_grid(degree: int) -> np.ndarray:
    """Return the reference sample grid used for sup-norm estimates."""

    return chebyshev_lobatto(sample_count(degree))


def sup_norm(p: PolyTraj) -> NormEstimate:
    """Estimate ``max_t ||p(t)||`` on a Chebyshev-Lobatto grid.

    The grid includes both end points; the value is an estimate, not a
    certified maximum.

    Args:
        p: Trajectory to measure.

    Returns:
        NormEstimate: Largest sampled Euclidean norm.

    """

    grid = sample_grid(p.degree)
    norms = np.linalg.norm(p.eval_reference(grid), axis=1)
    return NormEstimate(value=float(norms.max()), sample_count=int(grid.shape[0]))


def l2_norm(p: PolyTraj) -> float:
    """Return the exact L2 norm over the interval using orthogonality."""

    masses = 2.0 / (2.0 * np.arange(p.degree + 1) + 1.0)
    return float(np.sqrt(0.5 * p.interval.k * np.sum(masses * np.sum(p.coeffs**2, axis=1))))


def lp_norm(p: PolyTraj, order: float) -> float:
    """Return the ``L^order`` norm of ``||p(t)||`` over the interval.

    Orders ``1`` and ``2`` use a Gauss rule with ``2 (r + 1)`` nodes; order
    ``inf`` uses :func:`sup_norm`.

    Args:
        p: Trajectory to measure.
        order: One of ``1``, ``2`` or ``numpy.inf``.

    Returns:
        float: The norm value.

    Raises:
        ValueError: If ``order`` is not supported.

    """

    if order == np.inf:
        return sup_norm(p).value
    if order not in (1, 2):
        msg = f"Unsupported norm order {order}; use 1, 2 or inf"
        raise ValueError(msg)
    rule = gauss_rule(2 * (p.degree + 1))
    norms = np.linalg.norm(p.eval_reference(rule.nodes), axis=1)
    integral = 0.5 * p.interval.k * np.sum(rule.weights * norms**order)
    return float(integral ** (1.0 / order))
