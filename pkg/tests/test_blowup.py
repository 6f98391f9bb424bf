"""Exercise the blow-up constants, step rules and the marching loop.

The constants of the scalar benchmark are checked against their closed
forms, and full runs are checked for the stopping rules, the geometric growth
bounds of the theoretical mode and convergence towards ``ln(5/3)``.

"""

from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from galerkin_blowup.blowup import (
    GrowthBoundWarning,
    GrowthHypothesisError,
    GrowthParams,
    StepPlan,
    blowup_run,
    continuous_upper_bound,
    default_rho_0,
    discrete_diagnostics,
    exact_error,
    psi,
    psi_root,
    rho_max,
    step_size,
    validate_plan,
)
from galerkin_blowup.problems import example_blowup, power_law

EXAMPLE = GrowthParams(alpha=1.5, beta=2.0, delta=0.5, c_f=2.0, gamma=2.5, l_cf=5.0)


def test_psi_values_and_root() -> None:
    """Check ``Psi(0)``, the root and the monotone decrease towards the pole.

    Returns:
        None: This test does not return a value.

    """

    assert psi(0.0, EXAMPLE) == pytest.approx(1.25, abs=1e-12)
    root = psi_root(EXAMPLE)
    assert root == pytest.approx(0.243163, abs=1e-5)
    assert abs(psi(root, EXAMPLE)) <= 1e-10
    # closed form of the quadratic 2.25 rho^2 - 26.25 rho + 6.25 = 0
    assert root == pytest.approx((26.25 - math.sqrt(26.25**2 - 4.0 * 2.25 * 6.25)) / 4.5, abs=1e-11)
    grid = np.linspace(0.0, EXAMPLE.rho_pole * (1.0 - 1e-6), 200)
    values = np.array([psi(rho, EXAMPLE) for rho in grid])
    assert np.all(np.diff(values) < 0.0)
    assert values[-1] < -1e5
    with pytest.raises(ValueError):
        psi(EXAMPLE.rho_pole, EXAMPLE)


def test_rho_max_and_defaults() -> None:
    """Check the admissible bound for the benchmark constants.

    Returns:
        None: This test does not return a value.

    """

    assert rho_max(EXAMPLE, 3.0, 0.24) == pytest.approx(0.24)
    assert rho_max(EXAMPLE, 3.0, 0.1) == pytest.approx(0.1)
    # the second term vanishes as ||u0|| approaches c_F from above
    assert rho_max(EXAMPLE, 2.0 + 1e-9, 0.24) < 1e-8
    assert default_rho_0(EXAMPLE) == pytest.approx(0.9 * psi_root(EXAMPLE))
    with pytest.raises(GrowthHypothesisError):
        rho_max(EXAMPLE, 1.5, 0.1)
    with pytest.raises(GrowthHypothesisError):
        rho_max(EXAMPLE, 3.0, 0.3)


def test_step_size_rules() -> None:
    """Evaluate the theoretical and the empirical step rules.

    Returns:
        None: This test does not return a value.

    """

    theoretical = StepPlan(rho=0.1, mode="theoretical", scheme_constant=1.0, rho_0=0.2)
    assert step_size(theoretical, EXAMPLE, 3.0) == pytest.approx(0.16 * 0.1 * 2.35 / 3.0, rel=1e-12)
    empirical = StepPlan(rho=0.25)
    assert step_size(empirical, EXAMPLE, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-12)
    dg_plan = StepPlan.for_scheme(0.1, "dg", mode="theoretical", rho_0=0.2)
    assert dg_plan.scheme_constant == 2.0
    assert step_size(dg_plan, EXAMPLE, 3.0) == pytest.approx(0.5 * step_size(theoretical, EXAMPLE, 3.0))
    with pytest.raises(ValueError):
        step_size(empirical, EXAMPLE, 0.0)
    with pytest.raises(ValueError):
        StepPlan(rho=-0.1)
    with pytest.raises(ValueError):
        StepPlan(rho=0.1, mode="adaptive")
    with pytest.raises(ValueError):
        StepPlan.for_scheme(0.1, "rk4")


def test_growth_params_validation() -> None:
    """Ensure out-of-range growth constants are rejected.

    Returns:
        None: This test does not return a value.

    """

    with pytest.raises(ValueError):
        GrowthParams(alpha=1.0, beta=1.0, delta=1.0)
    with pytest.raises(ValueError):
        GrowthParams(alpha=0.0, beta=2.0, delta=1.0)
    with pytest.raises(ValueError):
        GrowthParams(alpha=1.0, beta=2.0, delta=1.0, c_f=-1.0)
    with pytest.raises(ValueError):
        psi_root(GrowthParams(alpha=1.0, beta=2.0, delta=1.0))


def test_continuous_bound_and_diagnostics() -> None:
    """Check the continuous bound ``2/3`` and the theoretical constants.

    Returns:
        None: This test does not return a value.

    """

    assert continuous_upper_bound(EXAMPLE, 3.0) == pytest.approx(2.0 / 3.0)
    assert math.log(5.0 / 3.0) <= continuous_upper_bound(EXAMPLE, 3.0)
    plan = StepPlan(rho=0.1, mode="theoretical", scheme_constant=1.0, rho_0=0.2)
    diagnostics = discrete_diagnostics(EXAMPLE, plan, 3.0)
    assert diagnostics.c0 == pytest.approx(psi(0.2, EXAMPLE) / 6.25)
    assert diagnostics.c1 == pytest.approx(1.5 * 1.2 / 2.2)
    assert 0.0 < diagnostics.c0 < diagnostics.c1
    assert diagnostics.varsigma == pytest.approx(2.5 / 2.2)
    assert diagnostics.upper_bound_discrete > 0.0


def test_validate_plan_reports_the_bound() -> None:
    """Ensure an inadmissible ``rho`` is rejected with the computed bound.

    Returns:
        None: This test does not return a value.

    """

    plan = StepPlan(rho=0.23, mode="theoretical", rho_0=0.2)
    with pytest.raises(GrowthHypothesisError) as error:
        validate_plan(plan, EXAMPLE, 3.0)
    assert "0.2" in str(error.value)
    validate_plan(StepPlan(rho=5.0), EXAMPLE, 3.0)
    with pytest.raises(GrowthHypothesisError):
        validate_plan(StepPlan(rho=0.1, mode="theoretical"), EXAMPLE, 3.0)


def test_run_rejects_initial_value_below_threshold() -> None:
    """Ensure ``||u0|| <= c_F`` violates the blow-up hypotheses.

    Returns:
        None: This test does not return a value.

    """

    low = GrowthParams(alpha=1.5, beta=2.0, delta=0.5, c_f=5.0, gamma=2.5, l_cf=11.0)
    with pytest.raises(GrowthHypothesisError):
        blowup_run(example_blowup(), low, StepPlan(rho=0.1), "cg", 0)


def test_infinite_tau_stops_after_first_step() -> None:
    """Ensure ``tau = inf`` returns ``k_1`` as the estimate.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    plan = StepPlan(rho=0.25)
    result = blowup_run(problem, problem.growth, plan, "dg", 0, tau=math.inf)
    assert result.stopped_by == "tolerance"
    assert result.steps == 1
    assert result.t_infinity_estimate == pytest.approx(0.25 / 3.0)
    assert result.norms == (3.0,)
    assert result.nodes == (0.0, result.t_infinity_estimate)


def test_positive_tau_stops_on_small_steps() -> None:
    """Ensure a finite threshold ends the run once ``k_m <= tau``.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    result = blowup_run(problem, problem.growth, StepPlan(rho=0.25), "cg", 1, tau=1e-6)
    assert result.stopped_by == "tolerance"
    assert result.step_sizes[-1] <= 1e-6
    assert all(k > 1e-6 for k in result.step_sizes[:-1])
    assert len(result.norms) == result.steps


@pytest.mark.parametrize("scheme", ["cg", "dg"])
def test_empirical_run_saturates_near_exact_time(scheme: str) -> None:
    """Run the benchmark to saturation and compare with ``ln(5/3)``.

    Args:
        scheme: Galerkin scheme.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    plan = StepPlan.for_scheme(0.0625, scheme)
    result = blowup_run(problem, problem.growth, plan, scheme, 1)
    assert result.stopped_by == "saturation"
    last = step_size(plan, problem.growth, result.norms[-1])
    assert result.t_infinity_estimate + last == result.t_infinity_estimate
    assert result.abs_error == exact_error(result.t_infinity_estimate, math.log(5.0 / 3.0))
    assert result.abs_error < 1e-3
    assert result.steps == len(result.step_sizes) == len(result.nodes) - 1
    assert np.all(np.diff(result.norms) > 0.0)
    assert result.diagnostics.c0 is None
    assert result.picard_iterations >= result.steps


@pytest.mark.parametrize("scheme", ["cg", "dg"])
def test_theoretical_run_respects_growth_bounds(scheme: str) -> None:
    """Run the theoretical rule at ``rho_max / 2`` and check the geometric bounds.

    Args:
        scheme: Galerkin scheme.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    rho_0 = default_rho_0(problem.growth)
    rho = 0.5 * rho_max(problem.growth, 3.0, rho_0)
    plan = StepPlan.for_scheme(rho, scheme, mode="theoretical", rho_0=rho_0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", GrowthBoundWarning)
        result = blowup_run(problem, problem.growth, plan, scheme, 0)
    assert result.geo_violations == 0
    diagnostics = result.diagnostics
    ratios = np.array(result.norms[1:]) / np.array(result.norms[:-1])
    assert np.all(ratios >= 1.0 + diagnostics.c0 * rho - 1e-12)
    assert np.all(ratios <= 1.0 + diagnostics.c1 * rho + 1e-12)
    assert result.t_infinity_estimate <= diagnostics.upper_bound_discrete
    assert diagnostics.lower_bound_discrete <= result.t_infinity_estimate * (1.0 + 1e-12)


def test_power_law_blowup_time() -> None:
    """Estimate the blow-up time of ``u' = u^2``, ``u(0) = 1`` (exactly ``1``).

    Returns:
        None: This test does not return a value.

    """

    problem = power_law(alpha=1.0, beta=2.0, u0=1.0)
    result = blowup_run(problem, problem.growth, StepPlan(rho=0.05), "cg", 1)
    assert result.stopped_by == "saturation"
    assert result.t_infinity_estimate == pytest.approx(1.0, abs=1e-3)


def test_max_steps_guard() -> None:
    """Ensure a run that cannot saturate within the limit is reported.

    Returns:
        None: This test does not return a value.

    """

    problem = example_blowup()
    with pytest.raises(GrowthHypothesisError):
        blowup_run(problem, problem.growth, StepPlan(rho=0.01), "dg", 0, max_steps=5)
