"""Exercise the reference-interval helpers.

The tests cover Legendre end point values, Gauss rule exactness, the
Chebyshev sample grid and the affine interval map.

"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from galerkin_blowup.legendre import (
    IntervalMap,
    chebyshev_lobatto,
    gauss_rule,
    legendre_eval,
    legendre_vandermonde,
    map_to_interval,
    map_to_reference,
)


def test_legendre_end_points_are_exact() -> None:
    """Ensure ``K_i(1) = 1`` and ``K_i(-1) = (-1)^i`` without round-off.

    Returns:
        None: This test does not return a value.

    """

    for i in range(31):
        assert legendre_eval(i, 1.0) == 1.0
        assert legendre_eval(i, -1.0) == (-1.0) ** i


def test_legendre_low_degrees_match_closed_forms() -> None:
    """Compare the first polynomials with their explicit formulas.

    Returns:
        None: This test does not return a value.

    """

    x = np.linspace(-1.0, 1.0, 11)
    np.testing.assert_allclose(legendre_eval(0, x), np.ones_like(x))
    np.testing.assert_allclose(legendre_eval(1, x), x)
    np.testing.assert_allclose(legendre_eval(2, x), 0.5 * (3.0 * x**2 - 1.0), atol=1e-15)


def test_legendre_rejects_invalid_input() -> None:
    """Ensure negative degrees and points outside the interval are rejected.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(ValueError):
        legendre_eval(-1, 0.0)
    with pytest.raises(ValueError):
        legendre_eval(2, 1.5)


@given(st.integers(min_value=1, max_value=40))
@settings(deadline=None, max_examples=40)
def test_gauss_rule_is_exact_for_degree_2n_minus_1(n: int) -> None:
    """Check weights, symmetry and exactness of the Gauss rule.

    Args:
        n: Number of nodes.

    Returns:
        None: This test does not return a value.

    """

    rule = gauss_rule(n)
    assert rule.size == n
    assert np.all(rule.weights > 0.0)
    assert np.all(np.diff(rule.nodes) > 0.0)
    assert abs(rule.weights.sum() - 2.0) <= 1e-13
    np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
    # odd moments vanish, even moments are 2 / (j + 1)
    for j in range(2 * n):
        expected = 0.0 if j % 2 else 2.0 / (j + 1)
        assert abs(np.sum(rule.weights * rule.nodes**j) - expected) <= 1e-13


def test_gauss_rule_is_cached_and_read_only() -> None:
    """Ensure repeated requests share one read-only rule.

    Returns:
        None: This test does not return a value.

    """

    assert gauss_rule(7) is gauss_rule(7)
    with pytest.raises(ValueError):
        gauss_rule(7).nodes[0] = 0.0
    with pytest.raises(ValueError):
        gauss_rule(0)


def test_gauss_rule_integrates_legendre_products() -> None:
    """Check discrete orthogonality ``sum w K_i K_j = 2 / (2i + 1) delta_ij``.

    Returns:
        None: This test does not return a value.

    """

    rule = gauss_rule(12)
    vander = legendre_vandermonde(rule.nodes, 11)
    gram = vander.T @ (rule.weights[:, None] * vander)
    np.testing.assert_allclose(gram, np.diag(2.0 / (2.0 * np.arange(12) + 1.0)), atol=1e-13)


def test_chebyshev_lobatto_grid() -> None:
    """Ensure the sample grid is ascending and contains both end points.

    Returns:
        None: This test does not return a value.

    """

    grid = chebyshev_lobatto(9)
    assert grid.shape == (9,)
    assert grid[0] == -1.0
    assert grid[-1] == 1.0
    assert np.all(np.diff(grid) > 0.0)
    with pytest.raises(ValueError):
        chebyshev_lobatto(1)


def test_interval_map_round_trip_and_end_points() -> None:
    """Map reference points forth and back on a shifted interval.

    Returns:
        None: This test does not return a value.

    """

    interval = IntervalMap(t_start=0.3, k=0.1)
    assert map_to_interval(interval, -1.0) == 0.3
    assert map_to_interval(interval, 1.0) == interval.t_end
    assert map_to_reference(interval, interval.t_end) == 1.0
    points = np.linspace(-1.0, 1.0, 7)
    np.testing.assert_allclose(map_to_reference(interval, map_to_interval(interval, points)), points, atol=1e-14)
    assert interval.contains(0.35)
    assert not interval.contains(0.5)


def test_interval_map_rejects_bad_input() -> None:
    """Ensure non-positive steps and outside times are rejected.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(ValueError):
        IntervalMap(t_start=0.0, k=0.0)
    with pytest.raises(ValueError):
        IntervalMap(t_start=0.0, k=float("inf"))
    with pytest.raises(ValueError):
        map_to_reference(IntervalMap(t_start=0.0, k=1.0), 1.5)
