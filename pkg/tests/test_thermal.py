import pytest
import sys
import os
import math

import numpy as np
import scipy.linalg as la

# Add the project root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from bose_core import thermal
from bose_core.exceptions import DualInfeasible, InvalidSchedule, NotPositiveSemidefinite
from bose_core.models import TemperatureSchedule
from bose_core.sdp import make_instance, slack_entries, spectral_summary
from bose_core.utils import (
    inst_a,
    random_density,
    random_slater_instance,
    random_unitary,
    seed_stream,
)

SCALAR_X = 1.0 / (math.e - 1.0)
SCALAR_CURVATURE = SCALAR_X * (SCALAR_X + 1.0)  # 0.92067...


def scalar_instance():
    return make_instance([[1.0]], [[[1.0]]], [0.0])


def central_difference(f, mu, h):
    out = []
    for i in range(len(mu)):
        e = np.zeros(len(mu))
        e[i] = h
        out.append((f(mu + e) - f(mu - e)) / (2.0 * h))
    return np.array(out)


class TestScalarEntropy:
    """g(x) = (x+1)ln(x+1) - x ln x"""

    def test_zero(self):
        assert thermal.scalar_entropy(0.0) == 0.0

    def test_one(self):
        assert thermal.scalar_entropy(1.0) == pytest.approx(2.0 * math.log(2.0))

    @pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
    def test_geometric_distribution_entropy(self, x):
        q = x / (x + 1.0)
        n = np.arange(200)
        p = (1.0 - q) * q**n
        shannon = float(-np.sum(p * np.log(p)))
        assert thermal.scalar_entropy(x) == pytest.approx(shannon, rel=1e-10)

    def test_vectorized(self):
        values = thermal.scalar_entropy(np.array([0.0, 1.0]))
        np.testing.assert_allclose(values, [0.0, 2.0 * math.log(2.0)])

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0, 100.0])
    def test_second_difference_is_negative(self, x):
        h = 0.5 * x
        curvature = thermal.scalar_entropy(x + h) - 2.0 * thermal.scalar_entropy(x) + thermal.scalar_entropy(x - h)
        assert curvature < 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            thermal.scalar_entropy(-0.1)


class TestBeEntropy:
    """S_BE(X) over the spectrum"""

    def test_zero_matrix(self):
        assert thermal.be_entropy(np.zeros((3, 3))) == 0.0

    def test_identity(self):
        assert thermal.be_entropy(np.eye(2)) == pytest.approx(4.0 * math.log(2.0))

    def test_unitary_invariance(self):
        rng = seed_stream(3, 0)
        X = 2.0 * random_density(4, rng)
        U = random_unitary(4, rng)
        rotated = U @ X @ U.conj().T
        assert thermal.be_entropy(rotated) == pytest.approx(thermal.be_entropy(X), abs=1e-10)

    def test_negative_eigenvalue(self):
        with pytest.raises(NotPositiveSemidefinite):
            thermal.be_entropy(np.diag([1.0, -0.5]))

    def test_trace_fixed_bound_is_attained_by_flat_spectrum(self):
        bound = thermal.trace_fixed_entropy_bound(3.0, 4)
        assert thermal.be_entropy(0.75 * np.eye(4)) == pytest.approx(bound)
        X = np.diag([2.0, 0.5, 0.5, 0.0])
        assert thermal.be_entropy(X) < bound


class TestThermalOperator:
    """X_T = (e^{K/T} - I)^{-1}"""

    def test_diagonal_values(self):
        op = thermal.thermal_operator(np.diag([1.0, 2.0]), 1.0)
        expected = [1.0 / (math.e - 1.0), 1.0 / (math.e**2 - 1.0)]
        np.testing.assert_allclose(np.diag(op.X.entries).real, expected, rtol=1e-12)
        np.testing.assert_allclose(op.occupations, expected, rtol=1e-12)
        assert op.occupations[0] == pytest.approx(0.58198, abs=1e-5)
        assert op.occupations[1] == pytest.approx(0.15652, abs=1e-5)

    def test_plus_identity(self):
        op = thermal.thermal_operator(np.diag([1.0]), 1.0)
        direct = 1.0 / (1.0 - math.exp(-1.0))
        assert op.X_plus_I.entries[0, 0].real == pytest.approx(direct, abs=1e-12)

    def test_eigenbasis_occupations(self):
        rng = seed_stream(4, 0)
        U = random_unitary(3, rng)
        values = np.array([0.3, 0.8, 1.7])
        K = U @ np.diag(values) @ U.conj().T
        op = thermal.thermal_operator(K, 0.4)
        rotated = op.K_spectrum.rotate(op.X.entries)
        expected = 1.0 / np.expm1(values / 0.4)
        np.testing.assert_allclose(np.diag(rotated).real, expected, atol=1e-10)

    def test_zero_temperature_limit(self):
        op = thermal.thermal_operator(np.diag([1.0]), 0.01)
        assert op.occupations[0] == pytest.approx(math.exp(-100.0), rel=1e-12)
        assert op.occupations[0] < 1e-43

    def test_overflow_is_zero(self):
        np.testing.assert_array_equal(thermal.occupation(np.array([1000.0]), 1.0), [0.0])

    def test_singular_k(self):
        with pytest.raises(DualInfeasible):
            thermal.thermal_operator(np.diag([0.0, 1.0]), 1.0)

    def test_bad_temperature(self):
        with pytest.raises(ValueError):
            thermal.thermal_operator(np.eye(2), 0.0)


class TestDualObjective:
    """f_T and f̃_T"""

    def test_inst_a_at_zero(self):
        expected = math.log(1.0 - math.exp(-1.0)) + math.log(1.0 - math.exp(-2.0))
        assert thermal.dual_objective(inst_a(), [0.0], 1.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(-0.60409, abs=1e-5)

    def test_low_temperature_limit(self):
        assert thermal.dual_objective(inst_a(), [0.5], 1e-3) == pytest.approx(0.5, abs=1e-6)

    def test_infeasible_point(self):
        with pytest.raises(DualInfeasible):
            thermal.dual_objective(inst_a(), [1.0], 1.0)

    def test_unregularized_energy_at_zero_is_trace(self):
        inst = inst_a()
        op = thermal.thermal_state(inst, [0.0], 0.7)
        expected = float(np.trace(inst.H.entries @ op.X.entries).real)
        assert thermal.unregularized_energy(inst, [0.0], 0.7) == pytest.approx(expected, rel=1e-12)


class TestGradient:
    """Analytic gradient q_i - Tr[X_T Q_i]"""

    def test_inst_a_at_zero(self):
        expected = 1.0 - (1.0 / (math.e - 1.0) + 1.0 / (math.e**2 - 1.0))
        grad = thermal.gradient(inst_a(), [0.0], 1.0)
        assert grad[0] == pytest.approx(expected, rel=1e-12)
        assert grad[0] == pytest.approx(0.26150, abs=1e-5)

    @pytest.mark.parametrize("d, c, seed", [(2, 1, 0), (4, 2, 1), (6, 3, 2), (8, 4, 3)])
    def test_matches_finite_difference(self, d, c, seed):
        inst = random_slater_instance(d, c, seed_stream(100 + seed, 0))
        mu = np.zeros(c)
        T = 0.5
        fd = central_difference(lambda m: thermal.dual_objective(inst, m, T), mu, 1e-5)
        np.testing.assert_allclose(thermal.gradient(inst, mu, T), fd, rtol=1e-6, atol=1e-8)


class TestHessian:
    """Analytic Hessian of f_T"""

    def test_scalar_case(self):
        h = thermal.hessian(scalar_instance(), [0.0], 1.0)
        assert h.shape == (1, 1)
        assert h[0, 0] == pytest.approx(-SCALAR_CURVATURE, rel=1e-10)
        assert h[0, 0] == pytest.approx(-0.92067, abs=1e-5)

    @pytest.mark.parametrize("d, c, seed", [(2, 1, 0), (4, 2, 1), (6, 3, 2), (8, 4, 3)])
    def test_matches_finite_difference(self, d, c, seed):
        inst = random_slater_instance(d, c, seed_stream(200 + seed, 0))
        mu = np.zeros(c)
        T = 0.5
        h = 1e-5
        columns = []
        for i in range(c):
            e = np.zeros(c)
            e[i] = h
            columns.append(
                (thermal.gradient(inst, mu + e, T) - thermal.gradient(inst, mu - e, T)) / (2.0 * h)
            )
        fd = np.array(columns).T
        np.testing.assert_allclose(thermal.hessian(inst, mu, T), fd, rtol=1e-5, atol=1e-7)

    def test_negative_semidefinite(self):
        inst = random_slater_instance(5, 3, seed_stream(300, 0))
        h = thermal.hessian(inst, np.zeros(3), 0.3)
        np.testing.assert_allclose(h, h.T)
        assert np.linalg.eigvalsh(h)[-1] <= 1e-12

    def test_kernel_is_continuous_at_degeneracy(self):
        exact = thermal.hessian_kernel(np.array([1.0, 1.0]), 1.0)
        near = thermal.hessian_kernel(np.array([1.0, 1.0 + 1e-9]), 1.0)
        apart = thermal.hessian_kernel(np.array([1.0, 1.0 + 1e-4]), 1.0)
        assert exact[0, 1] == pytest.approx(SCALAR_CURVATURE, rel=1e-12)
        assert near[0, 1] == pytest.approx(SCALAR_CURVATURE, rel=1e-8)
        assert apart[0, 1] == pytest.approx(near[0, 1], rel=1e-3)


class TestSmoothness:
    """Worst-case occupation and L_T"""

    def test_scalar_value(self):
        bound = thermal.smoothness_bound(scalar_instance(), 1.0, 1.0)
        assert bound.occupation == pytest.approx(SCALAR_X)
        assert bound.L_T == pytest.approx(SCALAR_CURVATURE)
        assert bound.step == pytest.approx(1.0 / SCALAR_CURVATURE)

    def test_low_temperature_regime(self):
        inst = inst_a()
        bound = thermal.smoothness_bound(inst, 1.0, 0.1)
        norm_sum = thermal.constraint_norm_sum(inst)
        assert norm_sum == pytest.approx(2.0)
        assert bound.occupation == pytest.approx(math.exp(-10.0), rel=1e-4)
        assert bound.L_T == pytest.approx(10.0 * math.exp(-10.0) * norm_sum, rel=1e-3)

    def test_bounds_hessian_above_floor(self):
        inst = random_slater_instance(4, 2, seed_stream(400, 0))
        floor = float(np.linalg.eigvalsh(inst.H.entries)[0])
        bound = thermal.smoothness_bound(inst, floor, 0.5)
        h = thermal.hessian(inst, np.zeros(2), 0.5)
        assert np.linalg.norm(h, 2) <= bound.L_T * (1.0 + 1e-12)

    def test_non_positive_floor(self):
        with pytest.raises(ValueError):
            thermal.smoothness_bound(inst_a(), 0.0, 1.0)


class TestTemperatureSchedules:
    """T from a target precision"""

    def test_dimension(self):
        schedule = TemperatureSchedule.dimension(10, 0.1)
        assert thermal.temperature_for_precision(schedule) == pytest.approx(0.01)

    def test_entropy(self):
        schedule = TemperatureSchedule.entropy(5.0, 0.5)
        assert thermal.temperature_for_precision(schedule) == pytest.approx(0.1)

    def test_spectral(self):
        schedule = TemperatureSchedule(
            mode="spectral", epsilon=0.1, dim=4, lambda_min=0.5, gap=1.0, degeneracy=1
        )
        T = thermal.temperature_for_precision(schedule)
        assert T == pytest.approx(min(0.05, 1.5 / math.log(91.0)))
        assert T == pytest.approx(0.05)

    def test_spectral_from_summary(self):
        summary = spectral_summary(np.diag([0.5, 1.5, 1.5, 1.5]))
        schedule = TemperatureSchedule.spectral(summary, 0.1)
        assert schedule.degeneracy == 1
        assert schedule.gap == pytest.approx(1.0)
        assert thermal.temperature_for_precision(schedule) == pytest.approx(0.05)

    def test_infinite_entropy_bound(self):
        schedule = TemperatureSchedule.entropy(math.inf, 0.1)
        with pytest.raises(InvalidSchedule):
            thermal.temperature_for_precision(schedule)

    def test_trace_constraint_schedule(self):
        schedule = TemperatureSchedule.from_trace_constraint(1.0, 2, 0.1)
        assert schedule.mode == "entropy"
        assert schedule.s_max == pytest.approx(2.0 * thermal.scalar_entropy(0.5))

    def test_missing_parameters(self):
        with pytest.raises(ValueError):
            TemperatureSchedule(mode="spectral", epsilon=0.1, dim=2)


class TestBounds:
    """Slackness and approximation bounds"""

    def test_regularized_slackness_vanishes(self):
        K = np.diag([0.2, 0.9, 2.5])
        op = thermal.thermal_operator(K, 0.3)
        residual, total = thermal.regularized_slackness(K, op)
        np.testing.assert_allclose(residual, 0.0, atol=1e-12)
        assert total == pytest.approx(float(np.sum(np.diag(K) * op.occupations)))

    def test_regularized_slackness_needs_matching_k(self):
        op = thermal.thermal_operator(np.diag([0.2, 0.9]), 0.3)
        with pytest.raises(ValueError):
            thermal.regularized_slackness(np.diag([0.2, 1.0]), op)

    def test_symmetric_instance_optimum(self):
        T = 0.1
        inst = make_instance(np.eye(2), [np.eye(2)], [1.0])
        mu = [1.0 - T * math.log(3.0)]
        assert thermal.gradient(inst, mu, T)[0] == pytest.approx(0.0, abs=1e-12)
        bounds = thermal.approximation_bounds(inst, mu, T, oracle_value=1.0, tol=1e-9)
        assert bounds.f_tilde == pytest.approx(1.0, abs=1e-12)
        assert bounds.summary.degeneracy == 2
        assert bounds.check("spectral").bound == pytest.approx(2.0 * T)
        assert bounds.check("dimension").bound == pytest.approx(2.0 * T)
        assert bounds.all_hold

    def test_without_oracle(self):
        bounds = thermal.approximation_bounds(inst_a(), [0.9], 0.05)
        assert bounds.all_hold is None
        assert bounds.check("entropy").holds is None
        with pytest.raises(KeyError):
            bounds.check("unknown")

    def test_spectral_tighter_than_dimension(self):
        T = 0.05
        spectral = thermal.spectral_gap_bound(T, 0.035, 1.0, 1, 2)
        assert spectral < T * 2
        assert spectral == pytest.approx(T, rel=1e-6)

    def test_single_mode_reduces_to_ground_term(self):
        assert thermal.spectral_gap_bound(0.05, 1.0, 0.0, 1, 1) == pytest.approx(0.05)


def interior_point(inst, rng, spread=0.3):
    """A strictly dual feasible mu: Q_0 = I absorbs the other components"""
    mu = spread * rng.standard_normal(inst.c)
    push = sum(abs(mu[i]) * np.linalg.norm(inst.Q[i].entries, 2) for i in range(1, inst.c))
    mu[0] = -push - 0.1
    return mu


class TestDualityIdentities:
    """Identities tying f_T, f̃_T, S_BE and X_T together"""

    CASES = [(d, c, seed, T) for d, c, seed in [(2, 1, 0), (3, 2, 1), (4, 3, 2)] for T in (0.05, 0.5, 2.0)]

    @pytest.mark.parametrize("d, c, seed, T", CASES)
    def test_free_energy_split(self, d, c, seed, T):
        """f_T = f̃_T - T·S_BE(X_T)"""
        rng = seed_stream(seed, 70)
        inst = random_slater_instance(d, c, rng)
        mu = interior_point(inst, rng)
        op = thermal.thermal_state(inst, mu, T)
        f_T = thermal.dual_objective(inst, mu, T)
        split = thermal.unregularized_energy(inst, mu, T) - T * thermal.be_entropy(op.X.entries)
        assert f_T == pytest.approx(split, abs=1e-9 * max(1.0, abs(f_T)))

    @pytest.mark.parametrize("d, c, seed, T", CASES)
    def test_shifted_operator_inverse(self, d, c, seed, T):
        """X_T + I = (I - e^{-K/T})^{-1}"""
        rng = seed_stream(seed, 71)
        inst = random_slater_instance(d, c, rng)
        K = slack_entries(inst, interior_point(inst, rng))
        op = thermal.thermal_operator(K, T)
        expected = la.inv(np.eye(d) - la.expm(-K / T))
        np.testing.assert_allclose(op.X_plus_I.entries, expected, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(op.X_plus_I.entries - op.X.entries, np.eye(d), atol=1e-12)

    @pytest.mark.parametrize("d, c, seed, T", CASES)
    def test_mode_energies_bounded_by_temperature(self, d, c, seed, T):
        """lambda_j x_j <= T per mode, so the gap sum is at most T·d"""
        rng = seed_stream(seed, 72)
        inst = random_slater_instance(d, c, rng)
        K = slack_entries(inst, interior_point(inst, rng))
        op = thermal.thermal_operator(K, T)
        residual, total = thermal.regularized_slackness(K, op)

        np.testing.assert_allclose(residual, 0.0, atol=1e-9)
        assert np.all(op.eigenvalues * op.occupations <= T * (1.0 + 1e-12))
        assert total <= T * d * (1.0 + 1e-12)

    def test_concave_along_segment(self):
        rng = seed_stream(3, 73)
        inst = random_slater_instance(3, 2, rng)
        start, end = interior_point(inst, rng), interior_point(inst, rng)
        f_start = thermal.dual_objective(inst, start, 0.2)
        f_end = thermal.dual_objective(inst, end, 0.2)
        for t in np.linspace(0.1, 0.9, 9):
            middle = thermal.dual_objective(inst, t * start + (1.0 - t) * end, 0.2)
            assert middle >= t * f_start + (1.0 - t) * f_end - 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
