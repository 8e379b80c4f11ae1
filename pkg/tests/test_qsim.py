import pytest
import sys
import os
import math

import numpy as np
from scipy.integrate import quad

# Add the project root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from bose_core import qsim
from bose_core.exceptions import BudgetInfeasible, DualInfeasible, InvalidDensityMatrix
from bose_core.models import EstimateReport
from bose_core.sdp import decompose_state_model, make_instance, slack_entries
from bose_core.thermal import hessian, thermal_operator
from bose_core.utils import inst_a, random_density, random_hermitian, seed_stream
from tests.circuit_oracle import hadamard_test, swap_test

SCALAR_X = 1.0 / (math.e - 1.0)
SCALAR_CURVATURE = SCALAR_X * (SCALAR_X + 1.0)


def random_pure_state(d, rng):
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


class TestCauchySampling:
    """Inverse-CDF Cauchy sampling"""

    def test_quantile_function(self):
        assert qsim.cauchy_from_uniform(0.75, 2.0) == pytest.approx(2.0)
        assert qsim.cauchy_from_uniform(0.5, 2.0) == 0.0

    def test_median(self):
        t = qsim.sample_cauchy(1.5, seed_stream(1, 0), size=100_000)
        assert abs(float(np.median(t))) <= 0.02 * 1.5

    def test_characteristic_function(self):
        t = qsim.sample_cauchy(1.0, seed_stream(2, 0), size=100_000)
        values = np.cos(t)
        sigma = float(values.std()) / math.sqrt(len(values))
        assert abs(float(values.mean()) - math.exp(-1.0)) <= 4.0 * sigma

    def test_scalar_draw(self):
        assert isinstance(qsim.sample_cauchy(1.0, seed_stream(3, 0)), float)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            qsim.sample_cauchy(0.0, seed_stream(4, 0))

    def test_density(self):
        assert qsim.cauchy_density(0.0, 2.0) == pytest.approx(1.0 / (2.0 * math.pi))
        mass, _ = quad(lambda t: qsim.cauchy_density(t, 1.0), -np.inf, np.inf)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_truncation(self):
        t = qsim.sample_truncated_cauchy(5.0, 2.0, seed_stream(5, 0), 10_000)
        assert np.all(np.abs(t) <= 2.0)

    @pytest.mark.parametrize("tau, lam, t_max", [(1.0, 1.0, 5.0), (0.5, 2.0, 4.0), (2.0, 0.5, 20.0)])
    def test_truncation_bias_is_bounded(self, tau, lam, t_max):
        """Redrawn tails shift the characteristic function by at most 2 tau / (pi t_max)"""
        t = qsim.sample_truncated_cauchy(tau, t_max, seed_stream(7, 0), 200_000)
        values = np.cos(t * lam)
        sigma = float(values.std()) / math.sqrt(len(values))
        bias = abs(float(values.mean()) - math.exp(-tau * lam))
        assert bias <= 2.0 * tau / (math.pi * t_max) + 3.0 * sigma
        assert abs(float(np.sin(t * lam).mean())) <= 4.0 / math.sqrt(len(values))

    def test_zero_scale_gives_zero(self):
        t = qsim.sample_truncated_cauchy(np.zeros(10), 1.0, seed_stream(6, 0), 10)
        np.testing.assert_array_equal(t, np.zeros(10))


class TestCircuitExpectations:
    """Closed-form <Z> against a statevector simulation"""

    def test_hadamard_at_zero_time(self):
        rho = random_density(3, seed_stream(10, 0))
        assert qsim.hadamard_expectation(rho, np.diag([1.0, 2.0, 3.0]), 0.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_hadamard_matches_statevector(self, seed):
        rng = seed_stream(11, seed)
        psi = random_pure_state(2, rng)
        K = random_hermitian(2, rng)
        t = float(rng.uniform(-3.0, 3.0))
        rho = np.outer(psi, psi.conj())
        assert qsim.hadamard_expectation(rho, K, t) == pytest.approx(
            hadamard_test(psi, K, t), abs=1e-10
        )

    def test_swap_at_zero_time(self):
        half = np.eye(2) / 2.0
        assert qsim.swap_hadamard_expectation(half, half, np.eye(2), 0.0, 0.0) == pytest.approx(0.5)

    def test_swap_orthogonal_projectors(self):
        e00 = np.diag([1.0, 0.0])
        e11 = np.diag([0.0, 1.0])
        value = qsim.swap_hadamard_expectation(e00, e11, np.diag([0.3, 1.2]), 0.7, -1.9)
        assert value == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_swap_matches_statevector(self, seed):
        rng = seed_stream(12, seed)
        psi = random_pure_state(2, rng)
        phi = random_pure_state(2, rng)
        K = random_hermitian(2, rng)
        t1, t2 = (float(x) for x in rng.uniform(-3.0, 3.0, size=2))
        rho = np.outer(psi, psi.conj())
        sigma = np.outer(phi, phi.conj())
        assert qsim.swap_hadamard_expectation(rho, sigma, K, t1, t2) == pytest.approx(
            swap_test(psi, phi, K, t1, t2), abs=1e-10
        )

    def test_invalid_density_matrices(self):
        with pytest.raises(InvalidDensityMatrix):
            qsim.hadamard_expectation(np.eye(2), np.eye(2), 0.0)
        with pytest.raises(InvalidDensityMatrix):
            qsim.hadamard_expectation(np.diag([1.5, -0.5]), np.eye(2), 0.0)
        with pytest.raises(InvalidDensityMatrix):
            qsim.hadamard_expectation(np.array([[0.5, 0.5], [0.0, 0.5]]), np.eye(2), 0.0)


class TestPlanBudget:
    """Truncation depth, cut-offs and shot counts"""

    def test_reference_gradient_budget(self):
        budget = qsim.plan_budget(0.5, 1.0, 0.3, 1.0)
        assert budget.depth == 6
        assert budget.shots == [3600] * 6
        expected = [120.0 * m / math.pi for m in range(1, 7)]
        np.testing.assert_allclose(budget.t_max, expected, rtol=1e-12)
        assert budget.t_max[0] == pytest.approx(38.197, abs=1e-3)
        assert budget.total_shots == 6 * 3600

    def test_cutoffs_increase(self):
        budget = qsim.plan_budget(0.2, 1.0, 0.1, 2.0)
        assert np.all(np.diff(budget.t_max) > 0.0)

    def test_error_split(self):
        budget = qsim.plan_budget(0.5, 1.0, 0.3, 1.0)
        assert budget.error_split == pytest.approx((0.1, 0.1, 0.1))

    def test_depth_floor(self):
        budget = qsim.plan_budget(10.0, 0.1, 0.3, 1.0)
        assert budget.depth == 1

    def test_hessian_budget_shapes(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, 1.0, mode="hessian")
        M = budget.depth
        assert M == 7
        assert len(budget.shots) == M * M
        assert len(budget.t_max) == 2 * M - 1
        assert budget.shots_for(2, 3) == budget.shots[M + 2]
        assert budget.cutoff(2, 3) == budget.t_max[3]

    def test_hessian_shot_count(self):
        """N = ceil(9·M⁴·α²/ε²) for the double series sum"""
        alpha, epsilon = 2.0, 0.1
        budget = qsim.plan_budget(1.0, 0.5, epsilon, alpha, mode="hessian")
        M = budget.depth
        assert budget.shots == [math.ceil(9.0 * M**4 * alpha**2 / epsilon**2)] * (M * M)

    def test_hessian_element_target(self):
        """The element target plans the whole budget at epsilon·T"""
        series = qsim.plan_budget(1.0, 0.5, 0.1, 2.0, mode="hessian")
        element = qsim.plan_budget(1.0, 0.5, 0.1, 2.0, mode="hessian", hessian_target="element")
        rescaled = qsim.plan_budget(1.0, 0.5, 0.05, 2.0, mode="hessian")
        assert element.depth == rescaled.depth
        assert element.shots == rescaled.shots
        assert element.t_max == rescaled.t_max
        assert element.epsilon == 0.1
        assert element.shots[0] > series.shots[0]

    def test_exploding_depth(self):
        with pytest.raises(BudgetInfeasible) as excinfo:
            qsim.plan_budget(1e-6, 1.0, 0.1, 1.0, max_depth=100)
        assert excinfo.value.limit == 100

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            qsim.plan_budget(0.0, 1.0, 0.1, 1.0)
        with pytest.raises(ValueError):
            qsim.plan_budget(1.0, 1.0, -0.1, 1.0)

    def test_with_shots(self):
        budget = qsim.with_shots(qsim.plan_budget(0.5, 1.0, 0.3, 1.0), 10)
        assert budget.shots == [10] * 6
        assert budget.depth == 6


class TestRuntimeModel:
    """Predicted gate counts"""

    def test_concrete_count(self):
        prediction = qsim.runtime_model(0.5, 1.0, 0.3, [1.0], 1.0)
        by_hand = sum(3600 * math.ceil(120.0 * m / math.pi) for m in range(1, 7))
        assert by_hand == 3600 * (39 + 77 + 115 + 153 + 191 + 230)
        assert prediction.concrete == by_hand

    def test_halving_epsilon_costs_eight_times(self):
        a = qsim.runtime_model(0.5, 1.0, 0.2, [1.0], 1.0)
        b = qsim.runtime_model(0.5, 1.0, 0.1, [1.0], 1.0)
        assert b.asymptotic / a.asymptotic == pytest.approx(8.0, rel=1e-12)

    def test_hessian_mode(self):
        prediction = qsim.runtime_model(1.0, 1.0, 0.1, [1.0, 2.0], 1.0, mode="hessian")
        assert prediction.concrete > 0
        assert prediction.asymptotic == pytest.approx(8.0 / 0.1**3)

    def test_end_to_end(self):
        prediction = qsim.runtime_model(
            1.0, 1.0, 0.1, [1.0], 1.0, mode="end_to_end",
            constraints=4, mu_norm=1.0, L_T=1.0, delta=1.0,
        )
        assert prediction.asymptotic == pytest.approx(32.0)
        assert prediction.concrete is None

    def test_end_to_end_needs_inputs(self):
        with pytest.raises(ValueError):
            qsim.runtime_model(1.0, 1.0, 0.1, [1.0], 1.0, mode="end_to_end")


class TestThermalTraceEstimator:
    """Sampled estimates of Tr[X_T Q]"""

    def setup_method(self):
        self.inst = inst_a()
        self.K = slack_entries(self.inst, [0.0])
        self.model = decompose_state_model(self.inst.Q[0])
        self.exact = 1.0 / (math.e - 1.0) + 1.0 / (math.e**2 - 1.0)

    @pytest.mark.slow
    @pytest.mark.stochastic
    def test_unbiased_within_three_stderr(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm)
        hits = 0
        for seed in range(100):
            estimate, stderr = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=seed)
            hits += abs(estimate - self.exact) <= 3.0 * stderr
        assert self.exact == pytest.approx(0.73850, abs=1e-5)
        assert hits >= 95

    @pytest.mark.stochastic
    def test_quadrupling_shots_halves_stderr(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm)
        _, small = qsim.estimate_thermal_trace(self.K, 1.0, self.model, qsim.with_shots(budget, 10_000), seed=7)
        _, large = qsim.estimate_thermal_trace(self.K, 1.0, self.model, qsim.with_shots(budget, 40_000), seed=7)
        assert large / small == pytest.approx(0.5, rel=0.2)

    def test_same_key_same_result(self):
        budget = qsim.with_shots(qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm), 500)
        first = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=3, key=(4, 0, 0))
        second = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=3, key=(4, 0, 0))
        other = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=3, key=(5, 0, 0))
        assert first == second
        assert first != other

    def test_scalar_series(self):
        model = decompose_state_model([[1.0]])
        budget = qsim.plan_budget(1.0, 1.0, 0.3, model.one_norm)
        M = budget.depth
        value, stderr = qsim.estimate_thermal_trace([[1.0]], 1.0, model, budget, mode="series")
        geometric = math.exp(-1.0) * (1.0 - math.exp(-M)) / (1.0 - math.exp(-1.0))
        assert stderr == 0.0
        assert value == pytest.approx(geometric, rel=1e-12)
        assert abs(value - SCALAR_X) <= 0.3 / 3.0

    def test_series_is_deterministic_and_within_budget(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm)
        first, _ = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=1, mode="series")
        second, _ = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, seed=2, mode="series")
        assert first == second
        assert abs(first - self.exact) <= 0.1 / 3.0

    def test_non_positive_k(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm)
        with pytest.raises(DualInfeasible):
            qsim.estimate_thermal_trace(np.diag([0.0, 1.0]), 1.0, self.model, budget)

    @pytest.mark.slow
    @pytest.mark.stochastic
    def test_diagonal_estimates_are_negative(self):
        """Diagonal entries of the concave dual's Hessian come out negative for every seed"""
        budget = qsim.with_shots(qsim.plan_budget(1.0, 1.0, 0.1, 1.0, mode="hessian"), 5_000)
        for seed in range(25):
            estimate, _ = qsim.estimate_hessian_element(
                [[1.0]], 1.0, self.model, self.model, budget, seed=seed
            )
            assert estimate < 0.0

    @pytest.mark.parametrize("seed", range(4))
    def test_series_diagonal_is_negative(self, seed):
        rng = seed_stream(90, seed)
        Q = random_hermitian(3, rng)
        K = random_density(3, rng) + 0.5 * np.eye(3)
        model = decompose_state_model(Q)
        budget = qsim.plan_budget(0.5, 1.0, 0.1, model.one_norm**2, mode="hessian")
        value, _ = qsim.estimate_hessian_element(K, 1.0, model, model, budget, mode="series")
        assert value < 0.0

    def test_budget_kind_is_checked(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, 1.0, mode="hessian")
        with pytest.raises(ValueError):
            qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget)

    def test_report_acceptance(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, self.model.one_norm)
        estimate, stderr = qsim.estimate_thermal_trace(self.K, 1.0, self.model, budget, mode="series")
        report = EstimateReport(mode="gradient", budget=budget, estimate=estimate, stderr=stderr, exact=self.exact)
        assert report.abs_error == pytest.approx(abs(estimate - self.exact))
        assert report.passes()


class TestHessianEstimator:
    """Sampled and series estimates of Hessian entries"""

    def setup_method(self):
        self.scalar = make_instance([[1.0]], [[[1.0]]], [0.0])
        self.model = decompose_state_model([[1.0]])

    @pytest.mark.slow
    @pytest.mark.stochastic
    def test_scalar_case_within_three_stderr(self):
        budget = qsim.with_shots(qsim.plan_budget(1.0, 1.0, 0.1, 1.0, mode="hessian"), 20_000)
        hits = 0
        for seed in range(5):
            estimate, stderr = qsim.estimate_hessian_element(
                [[1.0]], 1.0, self.model, self.model, budget, seed=seed
            )
            hits += abs(estimate + SCALAR_CURVATURE) <= 3.0 * stderr
        assert hits >= 4

    def test_scalar_series_within_budget(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, 1.0, mode="hessian")
        value, stderr = qsim.estimate_hessian_element(
            [[1.0]], 1.0, self.model, self.model, budget, mode="series"
        )
        assert stderr == 0.0
        assert abs(value - hessian(self.scalar, [0.0], 1.0)[0, 0]) <= 0.1 / 3.0

    def test_inst_a_series_within_budget(self):
        inst = inst_a()
        model = decompose_state_model(inst.Q[0])
        K = slack_entries(inst, [0.0])
        budget = qsim.plan_budget(1.0, 1.0, 0.1, model.one_norm**2, mode="hessian")
        value, _ = qsim.estimate_hessian_element(K, 1.0, model, model, budget, mode="series")
        assert abs(value - hessian(inst, [0.0], 1.0)[0, 0]) <= 0.1 / 3.0

    def test_budget_kind_is_checked(self):
        budget = qsim.plan_budget(1.0, 1.0, 0.1, 1.0)
        with pytest.raises(ValueError):
            qsim.estimate_hessian_element([[1.0]], 1.0, self.model, self.model, budget)


class TestSingleShots:
    """Individual weighted shots"""

    @pytest.mark.slow
    @pytest.mark.stochastic
    def test_gradient_shots_average_to_series_term(self):
        K = np.diag([1.0, 2.0])
        model = decompose_state_model(np.eye(2))
        rng = seed_stream(50, 0)
        values = np.array(
            [qsim.sample_gradient_shot(K, 1.0, model, 1, 1e6, rng).value for _ in range(20_000)]
        )
        expected = math.exp(-1.0) + math.exp(-2.0)
        sigma = float(values.std()) / math.sqrt(len(values))
        assert abs(float(values.mean()) - expected) <= 4.0 * sigma

    def test_gradient_shot_fields(self):
        model = decompose_state_model(np.diag([1.0, -1.0]))
        shot = qsim.sample_gradient_shot(np.eye(2), 1.0, model, 2, 10.0, seed_stream(51, 0))
        assert shot.z in (-1, 1)
        assert abs(shot.weight) == pytest.approx(2.0)
        assert shot.m == 2
        assert abs(shot.t) <= 10.0

    def test_hessian_shot_fields(self):
        model = decompose_state_model(np.eye(2))
        shot = qsim.sample_hessian_shot(np.eye(2), 1.0, model, model, 1, 2, 10.0, seed_stream(52, 0))
        assert shot.m2 == 2
        assert 0.0 <= shot.s <= 1.0
        assert shot.weight == pytest.approx(4.0)
        assert shot.value in (-4.0, 4.0)


class TestThermalOperatorConsistency:
    """The series sum converges to the thermal operator trace"""

    def test_deep_series(self):
        K = np.diag([0.4, 1.1, 2.0])
        rho = random_density(3, seed_stream(60, 0))
        model = decompose_state_model(rho)
        budget = qsim.plan_budget(0.4, 0.5, 1e-6, model.one_norm)
        value, _ = qsim.estimate_thermal_trace(K, 0.5, model, budget, mode="series")
        exact = float(np.trace(thermal_operator(K, 0.5).X.entries @ rho).real)
        assert value == pytest.approx(exact, abs=1e-6)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
