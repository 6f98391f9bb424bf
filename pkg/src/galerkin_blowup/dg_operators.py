"""Assemble the lifting operator and the discrete dG time derivative.

The lifting ``L_m(z)`` is the polynomial representing the left end point
evaluation ``V -> (z, V(t_{m-1}^+))`` in the L2 inner product of the time
step. The discrete dG time derivative ``chi(U) = U' + L_m(U(t_{m-1}^+))`` is
an isomorphism on polynomials of degree ``r``; its inverse is bounded by
``2 k^(1 - 1/p)`` uniformly in ``r`` and ``k``. Both operators act on every
vector component in the same way, so they are stored as dense
``(r + 1) x (r + 1)`` matrices on Legendre coefficients.

"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import linalg

from .legendre import IntervalMap
from .poly_traj import PolyTraj

CHI_INVERSE_CONSTANT: float = 2.0
"""Degree- and step-independent bound constant of the inverse dG operator."""

REFERENCE_INTERVAL = IntervalMap(t_start=-1.0, k=2.0)
"""The reference interval ``(-1, 1)`` viewed as a time step."""


@dataclass(frozen=True, eq=False)
class ChiOperator:
    """Discrete dG time derivative on polynomials of one degree and step length.

    Attributes:
        degree: Polynomial degree ``r``.
        k: Step length.
        forward_matrix: Matrix of ``chi`` acting on Legendre coefficients.
        factorization: LU factorization of ``forward_matrix`` from
            :func:`scipy.linalg.lu_factor`.

    """

    degree: int
    k: float
    forward_matrix: np.ndarray
    factorization: tuple[np.ndarray, np.ndarray]


def _lifting_weights(degree: int) -> np.ndarray:
    """Return ``(-1)^i (2i + 1) / 2`` for ``i <= degree``."""

    indices = np.arange(degree + 1)
    return (-1.0) ** indices * (2.0 * indices + 1.0) / 2.0


def lifting_reference(z: np.ndarray, degree: int) -> PolyTraj:
    """Return the reference lifting of ``z`` on ``(-1, 1)``.

    The result is ``z * sum_i (-1)^i (2i + 1) / 2 * K_i``, the unique
    polynomial with ``integral (L(z), V) = (z, V(-1))`` for every test ``V``
    of degree at most ``degree``.

    Args:
        z: Vector to lift.
        degree: Polynomial degree ``r``.

    Returns:
        PolyTraj: Lifting on the reference interval.

    Raises:
        ValueError: If ``degree`` is negative.

    """

    if degree < 0:
        msg = f"Lifting degree must be non-negative, received {degree}"
        raise ValueError(msg)
    vector = np.atleast_1d(np.asarray(z, dtype=float))
    coeffs = np.outer(_lifting_weights(degree), vector)
    return PolyTraj(interval=REFERENCE_INTERVAL, degree=degree, coeffs=coeffs)


def lifting(z: np.ndarray, interval: IntervalMap, degree: int) -> PolyTraj:
    """Return the lifting of ``z`` on a physical time step.

    Args:
        z: Vector to lift.
        interval: Time step.
        degree: Polynomial degree ``r``.

    Returns:
        PolyTraj: The reference lifting scaled by ``2 / k``.

    """

    reference = lifting_reference(z, degree)
    return PolyTraj(interval=interval, degree=degree, coeffs=(2.0 / interval.k) * reference.coeffs)


def derivative_matrix(degree: int, k: float) -> np.ndarray:
    """Return the ``(r + 1) x (r + 1)`` matrix of ``d/dt`` on Legendre coefficients."""

    rows = npleg.legder(np.eye(degree + 1), m=1, scl=2.0 / k, axis=0)
    matrix = np.zeros((degree + 1, degree + 1))
    matrix[: rows.shape[0]] = rows
    return matrix


@lru_cache(maxsize=512)
def _chi_cached(degree: int, k: float) -> ChiOperator:
    """Assemble and factor ``chi`` for one degree and step length.

    Args:
        degree: Polynomial degree ``r``.
        k: Step length.

    Returns:
        ChiOperator: Forward matrix and its LU factorization.

    Raises:
        ValueError: If the matrix contains non-finite entries.

    """

    signs = (-1.0) ** np.arange(degree + 1)
    lift = (2.0 / k) * _lifting_weights(degree)
    forward = derivative_matrix(degree, k) + np.outer(lift, signs)
    lu, piv = linalg.lu_factor(forward, check_finite=True)
    if np.any(np.diag(lu) == 0.0):
        msg = f"Singular dG operator for degree {degree} and step {k}"
        raise np.linalg.LinAlgError(msg)
    forward.setflags(write=False)
    lu.setflags(write=False)
    return ChiOperator(degree=degree, k=k, forward_matrix=forward, factorization=(lu, piv))


def chi_build(degree: int, interval: IntervalMap) -> ChiOperator:
    """Return the cached dG operator for ``degree`` and the step length of ``interval``.

    Entry ``(j, i)`` is the derivative matrix plus ``(2j + 1) / k (-1)^(i + j)``.

    Args:
        degree: Polynomial degree ``r``.
        interval: Time step; only its length matters.

    Returns:
        ChiOperator: Operator with its LU factorization.

    Raises:
        ValueError: If ``degree`` is negative.

    """

    if degree < 0:
        msg = f"Operator degree must be non-negative, received {degree}"
        raise ValueError(msg)
    return _chi_cached(int(degree), float(interval.k))


def _check_compatible(op: ChiOperator, p: PolyTraj) -> None:
    """Raise unless ``p`` lives in the space ``op`` acts on.

    Args:
        op: Assembled operator.
        p: Trajectory to check.

    Returns:
        None: This function does not return a value.

    Raises:
        ValueError: If the degree or the step length differ.

    """

    if p.degree != op.degree or p.interval.k != op.k:
        msg = (
            f"Trajectory (degree {p.degree}, k={p.interval.k}) does not match "
            f"operator (degree {op.degree}, k={op.k})"
        )
        raise ValueError(msg)


def chi_apply(op: ChiOperator, p: PolyTraj) -> PolyTraj:
    """Return ``chi(p) = p' + L(p(t_start))``.

    Args:
        op: Operator built for the degree and step of ``p``.
        p: Trajectory to transform.

    Returns:
        PolyTraj: Image under the dG time derivative.

    Raises:
        ValueError: If degree or step length differ from the operator.

    """

    _check_compatible(op, p)
    return PolyTraj(interval=p.interval, degree=p.degree, coeffs=op.forward_matrix @ p.coeffs)


def chi_solve(op: ChiOperator, v: PolyTraj) -> PolyTraj:
    """Return ``chi^{-1}(v)`` using the cached LU factorization.

    Args:
        op: Operator built for the degree and step of ``v``.
        v: Right-hand side trajectory.

    Returns:
        PolyTraj: The unique ``U`` with ``chi(U) = v``.

    Raises:
        ValueError: If degree or step length differ from the operator.

    """

    _check_compatible(op, v)
    coeffs = linalg.lu_solve(op.factorization, v.coeffs, check_finite=False)
    return PolyTraj(interval=v.interval, degree=v.degree, coeffs=coeffs)


def chi_condition(op: ChiOperator) -> float:
    """Return the 2-norm condition number of the forward matrix."""

    return float(np.linalg.cond(op.forward_matrix))
